//! Loop protocols for the phase measurement.
//!
//! ```text
//! loop = mu, omega          # cosine leg first, sine leg second
//! start = 0.1, 2            # defaults to the model values
//! radii = 0.01, 0.2
//! omega0T = 2e5             # or `period = 1e5`
//! orientation = ccw         # ccw (default) or cw
//! relax_time = 200          # default 20/λ, λ the relaxation rate
//! settle_time = 100         # default 10/λ
//! tol = 1e-11
//! initial = 2, 0            # (y, ydot) at t = 0
//! sweep_omega0T = 1e3, 1e4  # or `sweep_period = ...`
//! ```

use std::fmt;

use crate::model::ParseError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Ccw => "ccw",
            Orientation::Cw => "cw",
        })
    }
}

/// Loop duration, either absolute or in units of `1/ω₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Duration {
    Period(f64),
    Omega0T(f64),
}

impl Duration {
    pub fn period(self, omega0: f64) -> f64 {
        match self {
            Duration::Period(t) => t,
            Duration::Omega0T(x) => x / omega0,
        }
    }

    fn raw(self) -> f64 {
        match self {
            Duration::Period(t) | Duration::Omega0T(t) => t,
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-11;
pub const TOL_RANGE: (f64, f64) = (1e-13, 1e-6);

#[derive(Clone, Debug, PartialEq)]
pub struct CycleProtocol {
    pub loop_params: [String; 2],
    pub start: Option<[f64; 2]>,
    pub radii: [f64; 2],
    pub duration: Duration,
    pub orientation: Orientation,
    pub relax_time: Option<f64>,
    pub settle_time: Option<f64>,
    pub tol: f64,
    pub initial: [f64; 2],
    pub sweep: Vec<Duration>,
}

impl CycleProtocol {
    pub fn new(loop_params: [&str; 2], radii: [f64; 2], duration: Duration) -> Self {
        Self {
            loop_params: loop_params.map(String::from),
            start: None,
            radii,
            duration,
            orientation: Orientation::Ccw,
            relax_time: None,
            settle_time: None,
            tol: DEFAULT_TOL,
            initial: [2.0, 0.0],
            sweep: Vec::new(),
        }
    }

    pub fn with_duration(&self, duration: Duration) -> Self {
        Self { duration, ..self.clone() }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_protocol(text)
    }

    /// Structural checks that need no model.
    pub fn check(&self) -> Result<(), String> {
        if self.loop_params[0] == self.loop_params[1] {
            return Err(format!("loop parameters must differ, got `{}` twice", self.loop_params[0]));
        }
        if !self.radii.iter().all(|r| r.is_finite() && *r >= 0.0) {
            return Err("radii must be finite and non-negative".into());
        }
        for d in std::iter::once(&self.duration).chain(&self.sweep) {
            if !(d.raw().is_finite() && d.raw() > 0.0) {
                return Err(format!("loop duration {} must be positive", d.raw()));
            }
        }
        if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&self.tol) {
            return Err(format!("tol {} outside [{:e}, {:e}]", self.tol, TOL_RANGE.0, TOL_RANGE.1));
        }
        for (k, v) in [("relax_time", self.relax_time), ("settle_time", self.settle_time)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(format!("{k} must be finite and non-negative"));
                }
            }
        }
        if !self.initial.iter().chain(self.start.iter().flatten()).all(|v| v.is_finite()) {
            return Err("initial and start values must be finite".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("loop = {}, {}\n", self.loop_params[0], self.loop_params[1]);
        if let Some([a, b]) = self.start {
            s += &format!("start = {a:?}, {b:?}\n");
        }
        s += &format!("radii = {:?}, {:?}\n", self.radii[0], self.radii[1]);
        s += &match self.duration {
            Duration::Period(t) => format!("period = {t:?}\n"),
            Duration::Omega0T(x) => format!("omega0T = {x:?}\n"),
        };
        s += &format!("orientation = {}\n", self.orientation);
        if let Some(v) = self.relax_time {
            s += &format!("relax_time = {v:?}\n");
        }
        if let Some(v) = self.settle_time {
            s += &format!("settle_time = {v:?}\n");
        }
        s += &format!("tol = {:?}\n", self.tol);
        s += &format!("initial = {:?}, {:?}\n", self.initial[0], self.initial[1]);
        let list = |v: &[Duration]| v.iter().map(|d| format!("{:?}", d.raw())).collect::<Vec<_>>().join(", ");
        let (periods, scaled): (Vec<Duration>, Vec<Duration>) =
            self.sweep.iter().partition(|d| matches!(d, Duration::Period(_)));
        if !scaled.is_empty() {
            s += &format!("sweep_omega0T = {}\n", list(&scaled));
        }
        if !periods.is_empty() {
            s += &format!("sweep_period = {}\n", list(&periods));
        }
        s
    }
}

impl fmt::Display for CycleProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Comma-separated items with their 1-based columns.
fn items(value: &str, offset: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for part in value.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push((part.trim(), offset + pos + lead));
        pos += part.len() + 1;
    }
    out
}

fn number(s: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    let v: f64 = s.parse().map_err(|_| err(line, col, format!("expected a number, found `{s}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, col, format!("`{s}` is not finite")))
    }
}

fn numbers(value: &str, offset: usize, line: usize, n: Option<usize>) -> Result<Vec<f64>, ParseError> {
    let parts = items(value, offset);
    if let Some(n) = n {
        if parts.len() != n {
            return Err(err(line, offset, format!("expected {n} comma-separated values, found {}", parts.len())));
        }
    }
    parts.into_iter().map(|(s, c)| number(s, line, c)).collect()
}

fn pair(value: &str, offset: usize, line: usize) -> Result<[f64; 2], ParseError> {
    let v = numbers(value, offset, line, Some(2))?;
    Ok([v[0], v[1]])
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

pub fn parse_protocol(text: &str) -> Result<CycleProtocol, ParseError> {
    let mut loop_params = None;
    let mut radii = None;
    let mut duration = None;
    let mut p = CycleProtocol::new(["", ""], [0.0; 2], Duration::Period(1.0));
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(err(line, 1, "expected `key = value`"));
        };
        let key = body[..eq].trim();
        let key_col = body.len() - body.trim_start().len() + 1;
        let value_raw = &body[eq + 1..];
        let value = value_raw.trim();
        let vcol = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
        if value.is_empty() {
            return Err(err(line, vcol, format!("missing value for `{key}`")));
        }
        if seen.contains(&key) {
            return Err(err(line, key_col, format!("duplicate key `{key}`")));
        }
        let family_clash = |a: &str, b: &str| seen.contains(&a) && key == b || seen.contains(&b) && key == a;
        if family_clash("period", "omega0T") {
            return Err(err(line, key_col, format!("`{key}` conflicts with an earlier duration key")));
        }
        match key {
            "loop" => {
                let parts = items(value, vcol);
                if parts.len() != 2 {
                    return Err(err(line, vcol, "expected two parameter names"));
                }
                for (name, c) in &parts {
                    if !is_ident(name) {
                        return Err(err(line, *c, format!("`{name}` is not a parameter name")));
                    }
                }
                loop_params = Some([parts[0].0.to_string(), parts[1].0.to_string()]);
            }
            "start" => p.start = Some(pair(value, vcol, line)?),
            "radii" => radii = Some(pair(value, vcol, line)?),
            "period" => duration = Some(Duration::Period(number(value, line, vcol)?)),
            "omega0T" => duration = Some(Duration::Omega0T(number(value, line, vcol)?)),
            "orientation" => {
                p.orientation = match value {
                    "ccw" | "+1" | "1" => Orientation::Ccw,
                    "cw" | "-1" => Orientation::Cw,
                    other => return Err(err(line, vcol, format!("orientation must be ccw or cw, found `{other}`"))),
                }
            }
            "relax_time" => p.relax_time = Some(number(value, line, vcol)?),
            "settle_time" => p.settle_time = Some(number(value, line, vcol)?),
            "tol" => p.tol = number(value, line, vcol)?,
            "initial" => p.initial = pair(value, vcol, line)?,
            "sweep_period" => {
                p.sweep.extend(numbers(value, vcol, line, None)?.into_iter().map(Duration::Period));
            }
            "sweep_omega0T" => {
                p.sweep.extend(numbers(value, vcol, line, None)?.into_iter().map(Duration::Omega0T));
            }
            _ => return Err(err(line, key_col, format!("unknown key `{key}`"))),
        }
        seen.push(key);
    }
    let end = text.lines().count().max(1);
    p.loop_params = loop_params.ok_or_else(|| err(end, 1, "missing `loop`"))?;
    p.radii = radii.ok_or_else(|| err(end, 1, "missing `radii`"))?;
    p.duration = duration.ok_or_else(|| err(end, 1, "missing `period` or `omega0T`"))?;
    p.check().map_err(|m| err(end, 1, m))?;
    Ok(p)
}

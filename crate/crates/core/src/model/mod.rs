//! Oscillator definitions `ÿ + ω²y = Σᵢ εᵢ fᵢ(y, ẏ)` and their text format.
//!
//! The model file is line oriented; `#` starts a comment. Keys:
//!
//! ```text
//! omega = 2.0 [time_dependent]      # value optional; flag optional
//! param mu = 0.1 [time_dependent]   # one line per small parameter
//! param beta = 0.005
//! nonlinearity = mu*(1 - y^2)*ydot - beta*y^3
//! orders = mu, beta, mu*beta        # explicit order lattice, or
//! max_order = 2                     # every monomial up to this degree
//! vdp_omega_iteration = true        # VdP-only O(μω̇) phase term
//! nonadiabatic_order = 1            # 0 disables ε̇ entries; >1 rejected
//! ```
//!
//! Numbers are read as exact rationals (`0.1` is `1/10`). In the
//! nonlinearity, `y` and `ydot` are the coordinate and velocity; every
//! monomial must carry exactly one power of one small parameter.

pub mod expr;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::BigRational;
use num::Signed;

use crate::monomial::{Monomial, OMEGA};
use crate::rational::{format_rational, parse_rational, rational_to_f64};

pub use expr::Poly;

/// Parse failure with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A model that parsed but violates a structural invariant.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("nonlinearity term {term} has small-parameter degree {degree}; every term needs exactly one")]
    EpsDegree { term: String, degree: u32 },
    #[error("order lattice is empty; give `orders` or `max_order >= 1`")]
    NoOrders,
    #[error("order {order} requires {missing}, which is not in the lattice")]
    LatticeNotClosed { order: String, missing: String },
    #[error("order {0} mentions an undeclared parameter")]
    UnknownOrderParam(String),
    #[error("nonadiabatic order {0} is not supported (only 0 or 1)")]
    NonadiabaticOrder(u32),
}

pub const Y: &str = "y";
pub const YDOT: &str = "ydot";
const RESERVED: [&str; 6] = [Y, YDOT, OMEGA, "t", "t1", "w"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub value: Option<BigRational>,
    pub time_dependent: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OmegaSpec {
    pub value: Option<BigRational>,
    pub time_dependent: bool,
}

/// `Σ c · ε · y^a · ẏ^b`, keyed by `(ε, a, b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Nonlinearity {
    pub terms: BTreeMap<(String, u32, u32), BigRational>,
}

impl Nonlinearity {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Splits a parsed polynomial, enforcing one ε power per monomial.
    pub fn from_poly(poly: &Poly, params: &[ParamSpec]) -> Result<Self, ModelError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &poly.0 {
            let mut eps = None;
            let mut degree = 0;
            for (name, n) in m.iter() {
                if params.iter().any(|p| p.name == name) {
                    degree += n;
                    eps = Some(name.to_string());
                }
            }
            if degree != 1 {
                let mut tmp = Poly::default();
                tmp.0.insert(m.clone(), c.clone());
                return Err(ModelError::EpsDegree { term: tmp.to_text(), degree });
            }
            let key = (eps.expect("degree 1"), m.exponent(Y), m.exponent(YDOT));
            terms.insert(key, c.clone());
        }
        Ok(Self { terms })
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::default();
        for ((eps, a, b), c) in &self.terms {
            let m = Monomial::from_pairs([(eps.as_str(), 1), (Y, *a), (YDOT, *b)]);
            p.0.insert(m, c.clone());
        }
        p
    }

    /// Part of the nonlinearity multiplying a single parameter.
    pub fn part(&self, param: &str) -> BTreeMap<(u32, u32), BigRational> {
        self.terms.iter().filter(|((e, _, _), _)| e == param).map(|((_, a, b), c)| ((*a, *b), c.clone())).collect()
    }

    /// True for `ε(1 − y²)ẏ` in a single parameter `ε`, the Van der Pol drive.
    pub fn is_van_der_pol(&self) -> bool {
        let names: BTreeSet<&String> = self.terms.keys().map(|(e, _, _)| e).collect();
        if names.len() != 1 {
            return false;
        }
        let one = BigRational::from_integer(1.into());
        let name = names.into_iter().next().expect("one name");
        let mut want = BTreeMap::new();
        want.insert((name.clone(), 0, 1), one.clone());
        want.insert((name.clone(), 2, 1), -one);
        self.terms == want
    }
}

/// Validated oscillator model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub omega: OmegaSpec,
    pub params: Vec<ParamSpec>,
    pub nonlinearity: Nonlinearity,
    /// Divisor-closed set of ε-monomials to expand to.
    pub orders: Vec<Monomial>,
    pub vdp_omega_iteration: bool,
    pub nonadiabatic_order: u32,
}

impl ModelSpec {
    /// Builds and validates a model programmatically.
    pub fn new(
        omega: OmegaSpec,
        params: Vec<ParamSpec>,
        nonlinearity: Nonlinearity,
        orders: Vec<Monomial>,
    ) -> Result<Self, ModelError> {
        let m = Self { omega, params, nonlinearity, orders, vdp_omega_iteration: false, nonadiabatic_order: 1 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.orders.is_empty() {
            return Err(ModelError::NoOrders);
        }
        if self.nonadiabatic_order > 1 {
            return Err(ModelError::NonadiabaticOrder(self.nonadiabatic_order));
        }
        for (eps, _, _) in self.nonlinearity.terms.keys() {
            if self.param(eps).is_none() {
                return Err(ModelError::EpsDegree { term: eps.clone(), degree: 0 });
            }
        }
        let set: BTreeSet<&Monomial> = self.orders.iter().collect();
        for o in &self.orders {
            if o.is_one() {
                return Err(ModelError::NoOrders);
            }
            if o.iter().any(|(n, _)| self.param(n).is_none()) {
                return Err(ModelError::UnknownOrderParam(o.to_string()));
            }
            for d in o.nontrivial_divisors() {
                if !set.contains(&d) {
                    return Err(ModelError::LatticeNotClosed { order: o.to_string(), missing: d.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn max_order(&self) -> u32 {
        self.orders.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn in_lattice(&self, m: &Monomial) -> bool {
        m.is_one() || self.orders.contains(m)
    }

    pub fn omega_value(&self) -> Option<f64> {
        self.omega.value.as_ref().map(rational_to_f64)
    }

    /// Numeric value of a parameter or of `omega`.
    pub fn value(&self, name: &str) -> Option<f64> {
        if name == OMEGA {
            return self.omega_value();
        }
        self.param(name)?.value.as_ref().map(rational_to_f64)
    }

    /// Parameters flagged time dependent, in declaration order.
    pub fn time_dependent_params(&self) -> impl Iterator<Item = &ParamSpec> {
        self.params.iter().filter(|p| p.time_dependent)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        parse_model(text)
    }

    /// Canonical model text; `parse(to_text(m)) == m`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let flag = |b: bool| if b { " [time_dependent]" } else { "" };
        match &self.omega.value {
            Some(v) => s.push_str(&format!("omega = {}{}\n", rational_literal(v), flag(self.omega.time_dependent))),
            None if self.omega.time_dependent => s.push_str("omega [time_dependent]\n"),
            None => {}
        }
        for p in &self.params {
            match &p.value {
                Some(v) => {
                    s.push_str(&format!("param {} = {}{}\n", p.name, rational_literal(v), flag(p.time_dependent)))
                }
                None => s.push_str(&format!("param {}{}\n", p.name, flag(p.time_dependent))),
            }
        }
        s.push_str(&format!("nonlinearity = {}\n", self.nonlinearity.to_poly().to_text()));
        let orders: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        s.push_str(&format!("orders = {}\n", orders.join(", ")));
        if self.vdp_omega_iteration {
            s.push_str("vdp_omega_iteration = true\n");
        }
        if self.nonadiabatic_order != 1 {
            s.push_str(&format!("nonadiabatic_order = {}\n", self.nonadiabatic_order));
        }
        s
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Literal form that [`parse_rational`] reads back exactly.
fn rational_literal(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let s = format_rational(&q.abs());
        let body = s.trim_start_matches('(').trim_end_matches(')');
        if q.is_negative() {
            format!("-{body}")
        } else {
            body.to_string()
        }
    }
}

/// One logical line after comment stripping.
struct Line<'a> {
    number: usize,
    text: &'a str,
    /// Byte offset of `text` in the raw line.
    offset: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn split_flags<'a>(line: &Line<'a>, body: &'a str, body_offset: usize) -> Result<(&'a str, bool), ParseError> {
    let Some(open) = body.find('[') else {
        return Ok((body, false));
    };
    let close = body
        .rfind(']')
        .filter(|c| *c > open)
        .ok_or_else(|| err(line.number, line.offset + body_offset + open + 1, "unterminated `[`"))?;
    if !body[close + 1..].trim().is_empty() {
        return Err(err(line.number, line.offset + body_offset + close + 2, "unexpected text after flags"));
    }
    let mut td = false;
    for flag in body[open + 1..close].split(',').map(str::trim) {
        match flag {
            "time_dependent" => td = true,
            "" => {}
            other => {
                return Err(err(line.number, line.offset + body_offset + open + 2, format!("unknown flag `{other}`")));
            }
        }
    }
    Ok((&body[..open], td))
}

fn parse_value(line: &Line<'_>, text: &str, col: usize) -> Result<BigRational, ParseError> {
    parse_rational(text).ok_or_else(|| err(line.number, col, format!("invalid number `{}`", text.trim())))
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a comma-separated list of parameter monomials such as `mu, mu*beta, mu^2`.
pub fn parse_monomial_list(
    text: &str,
    line: usize,
    column: usize,
    known: impl Fn(&str) -> bool,
) -> Result<Vec<Monomial>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let col = column + text[..offset].chars().count() + (item.len() - item.trim_start().len());
        let poly = expr::parse_poly(item, line, column + text[..offset].chars().count(), &known)?;
        let mono = match poly.0.iter().next() {
            Some((m, c)) if poly.0.len() == 1 && c == &BigRational::from_integer(1.into()) && !m.is_one() => m.clone(),
            _ => return Err(err(line, col, format!("`{}` is not a parameter monomial", item.trim()))),
        };
        if out.contains(&mono) {
            return Err(err(line, col, format!("duplicate order `{mono}`")));
        }
        out.push(mono);
        offset += item.len() + 1;
    }
    Ok(out)
}

fn all_monomials_up_to(names: &[String], max: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for name in names {
        let mut next = Vec::new();
        for base in &out {
            for e in 0..=max {
                let m = base.mul(&Monomial::pow(name, e));
                if m.degree() <= max {
                    next.push(m);
                }
            }
        }
        out = next;
    }
    out.retain(|m| !m.is_one());
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then(a.cmp(b)));
    out
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<ModelSpec, ModelError> {
    let mut omega = OmegaSpec::default();
    let mut omega_seen = false;
    let mut params: Vec<ParamSpec> = Vec::new();
    let mut nonlinearity_src: Option<(Line<'_>, usize)> = None;
    let mut orders_src: Option<(Line<'_>, usize)> = None;
    let mut max_order: Option<u32> = None;
    let mut vdp_omega_iteration = false;
    let mut nonadiabatic_order = 1;
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let line = Line { number, text: trimmed.trim_end(), offset: code.len() - trimmed.len() };
        let col = |byte: usize| line.offset + line.text[..byte].chars().count() + 1;

        if let Some(rest) = line.text.strip_prefix("param ").or_else(|| line.text.strip_prefix("param\t")) {
            let rest_off = line.text.len() - rest.len();
            let (decl, td) = split_flags(&line, rest, rest_off)?;
            let (name, value) = match decl.split_once('=') {
                Some((n, v)) => {
                    let v_off = rest_off + n.len() + 1;
                    (n.trim(), Some(parse_value(&line, v, col(v_off))?))
                }
                None => (decl.trim(), None),
            };
            if !valid_ident(name) || RESERVED.contains(&name) {
                return Err(err(number, col(rest_off), format!("invalid parameter name `{name}`")).into());
            }
            if params.iter().any(|p| p.name == name) {
                return Err(err(number, col(rest_off), format!("parameter `{name}` declared twice")).into());
            }
            params.push(ParamSpec { name: name.to_string(), value, time_dependent: td });
            continue;
        }

        let (key, value, value_off) = match line.text.find('=') {
            Some(eq) => (line.text[..eq].trim(), &line.text[eq + 1..], eq + 1),
            None => (line.text.split('[').next().unwrap_or("").trim(), "", line.text.len()),
        };
        if key != "omega" && !line.text.contains('=') {
            return Err(err(number, col(0), format!("expected `key = value`, found `{}`", line.text)).into());
        }
        if !seen.insert(key.to_string()) {
            return Err(err(number, col(0), format!("duplicate key `{key}`")).into());
        }
        match key {
            "omega" => {
                omega_seen = true;
                let body = if line.text.contains('=') { value } else { &line.text[key.len()..] };
                let body_off = if line.text.contains('=') { value_off } else { key.len() };
                let (v, td) = split_flags(&line, body, body_off)?;
                omega.time_dependent = td;
                if !v.trim().is_empty() {
                    let q = parse_value(&line, v, col(body_off))?;
                    if !q.is_positive() {
                        return Err(err(number, col(body_off), "omega must be positive").into());
                    }
                    omega.value = Some(q);
                }
            }
            "nonlinearity" => {
                nonlinearity_src = Some((Line { number, text: line.text, offset: line.offset }, value_off))
            }
            "orders" => orders_src = Some((Line { number, text: line.text, offset: line.offset }, value_off)),
            "max_order" => {
                let n = value
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| err(number, col(value_off), "max_order must be a non-negative integer"))?;
                if n > 8 {
                    return Err(err(number, col(value_off), "max_order above 8 is not supported").into());
                }
                max_order = Some(n);
            }
            "vdp_omega_iteration" => {
                vdp_omega_iteration = match value.trim() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(err(number, col(value_off), "expected `true` or `false`").into()),
                }
            }
            "nonadiabatic_order" => {
                nonadiabatic_order = value
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| err(number, col(value_off), "nonadiabatic_order must be an integer"))?;
            }
            other => return Err(err(number, col(0), format!("unknown key `{other}`")).into()),
        }
    }
    let _ = omega_seen;

    let names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    let is_param = |n: &str| names.iter().any(|p| p == n);

    let nonlinearity = match &nonlinearity_src {
        Some((line, off)) => {
            let src = &line.text[*off..];
            let col0 = line.offset + line.text[..*off].chars().count() + 1;
            let poly = expr::parse_poly(src, line.number, col0, |n| n == Y || n == YDOT || is_param(n))?;
            Nonlinearity::from_poly(&poly, &params)?
        }
        None => Nonlinearity::default(),
    };

    let orders = match (&orders_src, max_order) {
        (Some((line, off)), _) => {
            let src = &line.text[*off..];
            let col0 = line.offset + line.text[..*off].chars().count() + 1;
            parse_monomial_list(src, line.number, col0, is_param)?
        }
        (None, Some(n)) => all_monomials_up_to(&names, n),
        (None, None) => all_monomials_up_to(&names, 1),
    };

    let model = ModelSpec { omega, params, nonlinearity, orders, vdp_omega_iteration, nonadiabatic_order };
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VDPD: &str = "\
# Van der Pol-Duffing
omega = 1
param mu = 0.01 [time_dependent]
param beta = 0.005 [time_dependent]
nonlinearity = mu*(1 - y^2)*ydot - beta*y^3
orders = mu, beta, mu*beta
";

    #[test]
    fn parses_vdpd() {
        let m = ModelSpec::parse(VDPD).unwrap();
        assert_eq!(m.params.len(), 2);
        assert_eq!(m.params[0].value, Some(BigRational::new(1.into(), 100.into())));
        assert!(m.params.iter().all(|p| p.time_dependent));
        assert_eq!(m.orders.len(), 3);
        assert_eq!(m.max_order(), 2);
        assert_eq!(m.nonlinearity.terms.len(), 3);
        assert!(!m.nonlinearity.is_van_der_pol());
        assert_eq!(m.value("beta"), Some(0.005));
        assert_eq!(m.value("omega"), Some(1.0));
    }

    #[test]
    fn text_round_trip() {
        let m = ModelSpec::parse(VDPD).unwrap();
        assert_eq!(ModelSpec::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn recognizes_van_der_pol() {
        let m = ModelSpec::parse(
            "omega = 2 [time_dependent]\nparam mu = 0.1\nnonlinearity = mu*ydot - mu*y^2*ydot\nmax_order = 2\n",
        )
        .unwrap();
        assert!(m.nonlinearity.is_van_der_pol());
        assert!(m.omega.time_dependent);
        assert_eq!(m.orders, vec![Monomial::var("mu"), Monomial::pow("mu", 2)]);
    }

    #[test]
    fn rejects_wrong_eps_degree() {
        let e = ModelSpec::parse("param mu\nnonlinearity = y^3").unwrap_err();
        assert!(matches!(e, ModelError::EpsDegree { degree: 0, .. }));
        let e = ModelSpec::parse("param mu\nnonlinearity = mu^2*y").unwrap_err();
        assert!(matches!(e, ModelError::EpsDegree { degree: 2, .. }));
    }

    #[test]
    fn rejects_open_lattice() {
        let e = ModelSpec::parse("param mu\nparam beta\nnonlinearity = mu*y\norders = mu, mu*beta").unwrap_err();
        assert!(matches!(e, ModelError::LatticeNotClosed { .. }));
    }

    #[test]
    fn rejects_higher_nonadiabatic_orders() {
        let e = ModelSpec::parse("param mu\nnonlinearity = mu*y\nnonadiabatic_order = 2").unwrap_err();
        assert_eq!(e, ModelError::NonadiabaticOrder(2));
    }

    #[test]
    fn errors_report_line_and_column() {
        let e = ModelSpec::parse("param mu\nnonlinearity = mu*(y + q)").unwrap_err();
        match e {
            ModelError::Parse(p) => assert_eq!((p.line, p.column), (2, 24)),
            other => panic!("unexpected {other:?}"),
        }
        let e = ModelSpec::parse("omega = 2\nfoo = 1").unwrap_err();
        assert!(e.to_string().starts_with("2:1:"));
        assert!(ModelSpec::parse("param y").is_err());
        assert!(ModelSpec::parse("param mu\nparam mu").is_err());
        assert!(ModelSpec::parse("omega = -1").is_err());
        assert!(ModelSpec::parse("param mu [fast]").is_err());
        assert!(ModelSpec::parse("omega = 2\nomega = 3").is_err());
    }

    #[test]
    fn empty_nonlinearity_is_allowed() {
        let m = ModelSpec::parse("omega = 1\nparam eps\n").unwrap();
        assert!(m.nonlinearity.is_zero());
        assert_eq!(m.orders, vec![Monomial::var("eps")]);
    }
}

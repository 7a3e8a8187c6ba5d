//! Polar form of an amplitude flow: with `A = r e^{iθ}/2`,
//! `ṙ = f(r, ε, ε̇)` and `θ̇ = Ω(r, ε, ε̇)`, each a polynomial in `r` per flow
//! entry.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::derivation::DerivationError;
use crate::flow::{AmplitudeFlow, FlowKey};
use crate::monomial::{Rate, OMEGA};
use crate::printer::format_real_coeff;
use crate::rational::{format_rational, rational_to_f64};

/// `Σ c · r^k · ω^w`, keyed by `(k, w)`.
pub type RPoly = BTreeMap<(u32, i32), BigRational>;

/// Numeric values of the small parameters and of `omega`.
pub type ParamValues = BTreeMap<String, f64>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolarRGSystem {
    pub f_parts: BTreeMap<FlowKey, RPoly>,
    pub omega_parts: BTreeMap<FlowKey, RPoly>,
}

/// Which polar equation to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    R,
    Theta,
}

fn add_to(map: &mut BTreeMap<FlowKey, RPoly>, key: &FlowKey, k: u32, w: i32, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let poly = map.entry(key.clone()).or_default();
    let slot = poly.entry((k, w)).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        poly.remove(&(k, w));
        if poly.is_empty() {
            map.remove(key);
        }
    }
}

/// Substitutes `A = re^{iθ}/2`: a monomial `c·ω^w·A^{q+1}(A*)^q` contributes
/// `Re(c)·ω^w·r^{2q+1}/4^q` to `ṙ` and `Im(c)·ω^w·r^{2q}/4^q` to `θ̇`.
pub fn polar_form(flow: &AmplitudeFlow) -> Result<PolarRGSystem, DerivationError> {
    if let Some((k, p, q)) = flow.covariance_violations().into_iter().next() {
        return Err(DerivationError::NotCovariant { entry: k.to_string(), p, q });
    }
    let mut sys = PolarRGSystem::default();
    for (key, poly) in &flow.entries {
        for ((_, q, w), c) in poly {
            let scale = BigRational::new(1.into(), num::BigInt::from(4).pow(*q));
            add_to(&mut sys.f_parts, key, 2 * q + 1, *w, &c.re * &scale);
            add_to(&mut sys.omega_parts, key, 2 * q, *w, &c.im * &scale);
        }
    }
    Ok(sys)
}

/// Evaluation request for one polar part.
#[derive(Clone, Copy, Debug)]
pub struct Probe<'a> {
    pub eq: Equation,
    /// Entries with this rate tag (`None` for the adiabatic part).
    pub rate: Option<&'a Rate>,
    /// Order of the `r` derivative (0, 1 or 2).
    pub dr: u32,
    /// Parameter to differentiate by, if any.
    pub dparam: Option<&'a str>,
}

impl<'a> Probe<'a> {
    pub fn value(eq: Equation) -> Self {
        Self { eq, rate: None, dr: 0, dparam: None }
    }

    pub fn rate(mut self, rate: Option<&'a Rate>) -> Self {
        self.rate = rate;
        self
    }

    pub fn dr(mut self, n: u32) -> Self {
        self.dr = n;
        self
    }

    pub fn dparam(mut self, name: Option<&'a str>) -> Self {
        self.dparam = name;
        self
    }
}

/// Sum of one order group: value and sum of absolute contributions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GroupValue {
    pub value: f64,
    pub scale: f64,
}

impl GroupValue {
    /// Zero up to cancellation noise.
    pub fn vanishes(&self) -> bool {
        self.value.abs() <= 1e-12 * self.scale
    }
}

fn falling(k: u32, n: u32) -> f64 {
    (0..n).map(|j| k as f64 - j as f64).product()
}

impl PolarRGSystem {
    pub fn parts(&self, eq: Equation) -> &BTreeMap<FlowKey, RPoly> {
        match eq {
            Equation::R => &self.f_parts,
            Equation::Theta => &self.omega_parts,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f_parts.is_empty() && self.omega_parts.is_empty()
    }

    /// Names of parameters appearing in the system (excluding `omega`).
    pub fn param_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for k in self.f_parts.keys().chain(self.omega_parts.keys()) {
            for (n, _) in k.eps.iter() {
                if !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
            if let Some(Rate::Param(n)) = &k.rate {
                if !out.iter().any(|o| o == n) {
                    out.push(n.clone());
                }
            }
        }
        out.sort();
        out
    }

    /// The probed quantity split by total small-parameter degree of the entry.
    pub fn groups(&self, probe: Probe<'_>, r: f64, vals: &ParamValues) -> BTreeMap<u32, GroupValue> {
        let omega = vals.get(OMEGA).copied().unwrap_or(f64::NAN);
        let get = |n: &str| vals.get(n).copied();
        let mut out: BTreeMap<u32, GroupValue> = BTreeMap::new();
        for (key, poly) in self.parts(probe.eq) {
            if key.rate.as_ref() != probe.rate {
                continue;
            }
            let (eps_factor, d_omega) = match probe.dparam {
                None => (key.eps.eval(get), false),
                Some(n) if n == OMEGA => (key.eps.eval(get), true),
                Some(n) => match key.eps.derivative(n) {
                    Some((e, rest)) => (e as f64 * rest.eval(get), false),
                    None => continue,
                },
            };
            if eps_factor == 0.0 {
                continue;
            }
            let g = out.entry(key.eps.degree()).or_default();
            for ((k, w), c) in poly {
                if *k < probe.dr {
                    continue;
                }
                let mut v = rational_to_f64(c) * falling(*k, probe.dr) * r.powi((*k - probe.dr) as i32);
                if d_omega {
                    v *= *w as f64 * omega.powi(w - 1);
                } else {
                    v *= omega.powi(*w);
                }
                v *= eps_factor;
                g.value += v;
                g.scale += v.abs();
            }
        }
        out
    }

    /// Full value of a probe (all orders summed).
    pub fn probe(&self, probe: Probe<'_>, r: f64, vals: &ParamValues) -> f64 {
        self.groups(probe, r, vals).values().map(|g| g.value).sum()
    }

    /// Lowest-order nonvanishing group of a probe, zero if every group vanishes.
    pub fn leading(&self, probe: Probe<'_>, r: f64, vals: &ParamValues) -> f64 {
        self.groups(probe, r, vals).values().find(|g| !g.vanishes()).map(|g| g.value).unwrap_or(0.0)
    }

    /// `(ṙ, θ̇)` with rates looked up by parameter name (`"omega"` for ω̇).
    pub fn rates_at(&self, r: f64, vals: &ParamValues, rates: &dyn Fn(&str) -> f64) -> (f64, f64) {
        let eval = |eq: Equation| {
            let mut total = self.probe(Probe::value(eq), r, vals);
            for key in self.parts(eq).keys() {
                if let Some(rate) = &key.rate {
                    let v = rates(rate.param_name());
                    if v != 0.0 {
                        let single = self.single(eq, key, r, vals);
                        total += v * single;
                    }
                }
            }
            total
        };
        (eval(Equation::R), eval(Equation::Theta))
    }

    fn single(&self, eq: Equation, key: &FlowKey, r: f64, vals: &ParamValues) -> f64 {
        let omega = vals.get(OMEGA).copied().unwrap_or(f64::NAN);
        let eps = key.eps.eval(|n| vals.get(n).copied());
        self.parts(eq)
            .get(key)
            .map(|poly| {
                poly.iter().map(|((k, w), c)| rational_to_f64(c) * r.powi(*k as i32) * omega.powi(*w)).sum::<f64>()
            })
            .unwrap_or(0.0)
            * eps
    }

    /// Canonical text, `r_dot = ...` and `theta_dot = ...`.
    pub fn render(&self) -> String {
        format!("r_dot = {}\ntheta_dot = {}", render_parts(&self.f_parts), render_parts(&self.omega_parts))
    }
}

fn ordered(parts: &BTreeMap<FlowKey, RPoly>) -> Vec<(&FlowKey, &RPoly)> {
    let mut v: Vec<_> = parts.iter().collect();
    v.sort_by(|(a, _), (b, _)| {
        (a.rate.is_some(), a.eps.degree(), &a.rate, &a.eps).cmp(&(b.rate.is_some(), b.eps.degree(), &b.rate, &b.eps))
    });
    v
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    use num::Integer;
    BigRational::new(a.numer().abs().gcd(&b.numer().abs()), a.denom().lcm(b.denom()))
}

fn power(sym: &str, n: i64) -> Option<String> {
    match n {
        0 => None,
        1 => Some(sym.to_string()),
        _ => Some(format!("{sym}^{n}")),
    }
}

/// One entry as `content*factors*w^k*r^j*(poly in r)`.
fn render_entry(key: &FlowKey, poly: &RPoly) -> (bool, String) {
    let w0 = poly.keys().next().map(|(_, w)| *w).unwrap_or(0);
    if poly.keys().any(|(_, w)| *w != w0) {
        let terms: Vec<String> = poly
            .iter()
            .map(|((k, w), c)| {
                let mut f = vec![format_rational(c)];
                f.extend(power("w", *w as i64));
                f.extend(power("r", *k as i64));
                f.join("*")
            })
            .collect();
        let mut f = key.factors();
        f.push(format!("({})", terms.join(" + ")));
        return (false, f.join("*"));
    }
    let k_min = poly.keys().map(|(k, _)| *k).min().unwrap_or(0);
    let mut g = BigRational::zero();
    for c in poly.values() {
        g = if g.is_zero() { c.abs() } else { rational_gcd(&g, c) };
    }
    let lead = poly.iter().next().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::one);
    let negative = lead.is_negative();
    let signed = if negative { -g.clone() } else { g.clone() };

    let mut inner = String::new();
    for (idx, ((k, _), c)) in poly.iter().enumerate() {
        let c = c / &signed;
        let (neg, mag) = format_real_coeff(&c);
        if idx == 0 {
            if neg {
                inner.push('-');
            }
        } else {
            inner.push(if neg { '-' } else { '+' });
        }
        let var = power("r", (*k - k_min) as i64);
        match (mag.is_empty(), var) {
            (_, None) => inner.push_str(if mag.is_empty() { "1" } else { &mag }),
            (true, Some(v)) => inner.push_str(&v),
            (false, Some(v)) => inner.push_str(&format!("{mag}*{v}")),
        }
    }

    let mut f = Vec::new();
    if !g.is_one() {
        f.push(format_rational(&g));
    }
    f.extend(key.factors());
    f.extend(power("w", w0 as i64));
    f.extend(power("r", k_min as i64));
    if poly.len() > 1 {
        f.push(format!("({inner})"));
    }
    if f.is_empty() {
        f.push("1".into());
    }
    (negative, f.join("*"))
}

fn render_parts(parts: &BTreeMap<FlowKey, RPoly>) -> String {
    let mut out = String::new();
    for (idx, (k, poly)) in ordered(parts).into_iter().enumerate() {
        let (neg, body) = render_entry(k, poly);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

//! Canonical text form of series, amplitude flows and polar systems.
//!
//! Output is deterministic and bit-exact for a given value: groups follow the
//! canonical term order, and each group is printed as
//! `content*eps*w^k*(t-t1)^l*A^n*|A|^j*(poly in |A|^2)*e^{m i w t}`.
//! `w` stands for ω, `conj(A)` for A*, `x_dot` for the rate of parameter `x`.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::monomial::Monomial;
use crate::rational::{format_rational, RationalComplex};
use crate::series::FourierSecularSeries;

/// A sum of `c · ω^k · A^p (A*)^q` monomials printed as one factored group.
pub(crate) type AmpTerms = BTreeMap<(u32, u32, i32), RationalComplex>;

/// Sign plus printable factors of one group. The caller joins groups.
pub(crate) struct Group {
    pub negative: bool,
    pub body: String,
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    let n = a.numer().abs().gcd(&b.numer().abs());
    let d = a.denom().lcm(b.denom());
    BigRational::new(n, d)
}

/// Unit (1 or i) and positive rational magnitude shared by all coefficients,
/// when they are all real or all imaginary.
fn content(coeffs: &[&RationalComplex]) -> Option<(bool, BigRational)> {
    let imag = if coeffs.iter().all(|c| c.is_real()) {
        false
    } else if coeffs.iter().all(|c| c.is_imaginary()) {
        true
    } else {
        return None;
    };
    let mut g = BigRational::zero();
    for c in coeffs {
        let part = if imag { &c.im } else { &c.re };
        g = if g.is_zero() { part.abs() } else { rational_gcd(&g, part) };
    }
    Some((imag, g))
}

fn power(sym: &str, n: i64) -> Option<String> {
    match n {
        0 => None,
        1 => Some(sym.to_string()),
        _ => Some(format!("{sym}^{n}")),
    }
}

pub(crate) fn harmonic_factor(m: i32) -> Option<String> {
    match m {
        0 => None,
        1 => Some("e^{i w t}".into()),
        -1 => Some("e^{-i w t}".into()),
        _ => Some(format!("e^{{{m} i w t}}")),
    }
}

fn poly_in_abs2(entries: &[(u32, RationalComplex)]) -> String {
    let mut s = String::new();
    for (idx, (j, c)) in entries.iter().enumerate() {
        let (neg, mag) =
            if c.is_real() { (c.re.is_negative(), RationalComplex::real(c.re.abs())) } else { (false, c.clone()) };
        if idx == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let var = power("|A|", 2 * *j as i64);
        match var {
            None => s.push_str(&mag.to_string()),
            Some(v) => {
                if mag == RationalComplex::one() {
                    s.push_str(&v);
                } else {
                    s.push_str(&format!("{mag}*{v}"));
                }
            }
        }
    }
    s
}

/// Formats a group of amplitude monomials with leading scalar factors.
pub(crate) fn format_group(prefix: &[String], terms: &AmpTerms, suffix: &[String]) -> Group {
    let d0 = terms.keys().next().map(|(p, q, _)| *p as i64 - *q as i64);
    let w0 = terms.keys().next().map(|(_, _, w)| *w);
    let uniform = terms.keys().all(|(p, q, w)| Some(*p as i64 - *q as i64) == d0 && Some(*w) == w0);

    if !uniform {
        let mut parts = Vec::new();
        for ((p, q, w), c) in terms {
            let mut f = vec![c.to_string()];
            f.extend(power("w", *w as i64));
            f.extend(power("A", *p as i64));
            f.extend(power("conj(A)", *q as i64));
            parts.push(f.join("*"));
        }
        let mut body: Vec<String> = prefix.to_vec();
        body.push(format!("({})", parts.join(" + ")));
        body.extend_from_slice(suffix);
        return Group { negative: false, body: body.join("*") };
    }

    let d = d0.unwrap_or(0);
    let w = w0.unwrap_or(0);
    // j = min(p, q) indexes the power of |A|².
    let mut by_j: Vec<(u32, RationalComplex)> = terms.iter().map(|((p, q, _), c)| ((*p).min(*q), c.clone())).collect();
    by_j.sort_by_key(|(j, _)| *j);
    let j_min = by_j[0].0;

    let coeffs: Vec<&RationalComplex> = by_j.iter().map(|(_, c)| c).collect();
    let (negative, scalar, inner): (bool, Option<RationalComplex>, Vec<(u32, RationalComplex)>) = match content(&coeffs)
    {
        Some((imag, g)) => {
            let lead = if imag { &by_j[0].1.im } else { &by_j[0].1.re };
            let neg = lead.is_negative();
            let signed_g = if neg { -g.clone() } else { g.clone() };
            let unit = if imag { RationalComplex::i() } else { RationalComplex::one() };
            let divisor = unit.scale(&signed_g);
            let inner = by_j.iter().map(|(j, c)| (j - j_min, c / &divisor)).collect();
            let mag = unit.scale(&g);
            let scalar = if mag == RationalComplex::one() { None } else { Some(mag) };
            (neg, scalar, inner)
        }
        None => (false, None, by_j.iter().map(|(j, c)| (j - j_min, c.clone())).collect()),
    };

    let mut f: Vec<String> = Vec::new();
    if let Some(s) = scalar {
        f.push(s.to_string());
    }
    f.extend_from_slice(prefix);
    f.extend(power("w", w as i64));
    f.extend(suffix.iter().filter(|s| s.starts_with("(t-t1)")).cloned());
    if d >= 0 {
        f.extend(power("A", d));
    } else {
        f.extend(power("conj(A)", -d));
    }
    f.extend(power("|A|", 2 * j_min as i64));
    let single_unit = inner.len() == 1 && inner[0].1 == RationalComplex::one() && inner[0].0 == 0;
    if !single_unit {
        f.push(format!("({})", poly_in_abs2(&inner)));
    }
    f.extend(suffix.iter().filter(|s| !s.starts_with("(t-t1)")).cloned());
    if f.is_empty() {
        f.push("1".into());
    }
    Group { negative, body: f.join("*") }
}

/// Joins groups into lines: first line carries a bare sign, the rest a
/// leading `+ ` or `- `.
pub(crate) fn join_groups(groups: &[Group]) -> String {
    if groups.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, g) in groups.iter().enumerate() {
        if idx == 0 {
            if g.negative {
                out.push('-');
            }
        } else {
            out.push('\n');
            out.push_str(if g.negative { "- " } else { "+ " });
        }
        out.push_str(&g.body);
    }
    out
}

pub(crate) fn eps_factors(eps: &Monomial, eps_dot: &Monomial) -> Vec<String> {
    let mut f = Vec::new();
    if !eps.is_one() {
        f.push(eps.to_string());
    }
    for (name, n) in eps_dot.iter() {
        f.extend(power(&format!("{name}_dot"), n as i64));
    }
    f
}

/// Canonical text of a series, one `(ε, ε̇, m, l)` group per line.
pub fn render_series(series: &FourierSecularSeries) -> String {
    type GroupKey = (Monomial, Monomial, i32, u32);
    let mut groups: BTreeMap<GroupKey, AmpTerms> = BTreeMap::new();
    for (k, c) in series.iter() {
        groups
            .entry((k.eps.clone(), k.eps_dot.clone(), k.harmonic, k.t_pow))
            .or_default()
            .insert((k.p, k.q, k.omega_pow), c.clone());
    }
    let rendered: Vec<Group> = groups
        .iter()
        .map(|((eps, eps_dot, m, l), terms)| {
            let prefix = eps_factors(eps, eps_dot);
            let mut suffix = Vec::new();
            suffix.extend(power("(t-t1)", *l as i64));
            suffix.extend(harmonic_factor(*m));
            format_group(&prefix, terms, &suffix)
        })
        .collect();
    join_groups(&rendered)
}

/// Plain text of an exact rational times `w^k`, used by the polar printer.
pub(crate) fn format_real_coeff(c: &BigRational) -> (bool, String) {
    let neg = c.is_negative();
    let a = c.abs();
    if a.is_one() {
        (neg, String::new())
    } else {
        (neg, format_rational(&a))
    }
}

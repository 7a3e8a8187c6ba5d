//! Products of named small parameters, and the rate tags that mark
//! first-order nonadiabatic entries.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// `Π εᵢ^{nᵢ}` keyed by parameter name. Zero exponents are never stored, so
/// structural equality is monomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str) -> Self {
        Self::pow(name, 1)
    }

    pub fn pow(name: &str, n: u32) -> Self {
        let mut m = BTreeMap::new();
        if n > 0 {
            m.insert(name.to_string(), n);
        }
        Self(m)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u32)>) -> Self {
        let mut out = Self::one();
        for (name, n) in pairs {
            out = out.mul(&Self::pow(name, n));
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            *out.entry(k.clone()).or_insert(0) += v;
        }
        Self(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            let e = out.get_mut(k)?;
            if *e < *v {
                return None;
            }
            *e -= v;
            if *e == 0 {
                out.remove(k);
            }
        }
        Some(Self(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div(self).is_some()
    }

    /// Every divisor of `self` except `1` (including `self`).
    pub fn nontrivial_divisors(&self) -> Vec<Monomial> {
        let mut acc = vec![Monomial::one()];
        for (name, n) in &self.0 {
            let mut next = Vec::new();
            for base in &acc {
                for e in 0..=*n {
                    next.push(base.mul(&Monomial::pow(name, e)));
                }
            }
            acc = next;
        }
        acc.retain(|d| !d.is_one());
        acc
    }

    /// Numeric value given parameter values; missing names evaluate as zero.
    pub fn eval(&self, value: impl Fn(&str) -> Option<f64>) -> f64 {
        self.0.iter().map(|(k, &n)| value(k).unwrap_or(0.0).powi(n as i32)).product()
    }

    /// `∂/∂ε_name` as `(exponent, monomial/ε_name)`; `None` when the variable is absent.
    pub fn derivative(&self, name: &str) -> Option<(u32, Monomial)> {
        let n = self.exponent(name);
        if n == 0 {
            return None;
        }
        Some((n, self.div(&Monomial::var(name)).expect("divides")))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(k, &n)| if n == 1 { k.clone() } else { format!("{k}^{n}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// What a first-order nonadiabatic entry is proportional to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rate {
    /// `ε̇` of a named small parameter.
    Param(String),
    /// `ω̇`.
    Omega,
}

impl Rate {
    /// Name of the parameter whose rate this is (`"omega"` for ω̇).
    pub fn param_name(&self) -> &str {
        match self {
            Rate::Param(p) => p,
            Rate::Omega => OMEGA,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_dot", self.param_name())
    }
}

/// Reserved name of the base frequency when it is used as a loop parameter.
pub const OMEGA: &str = "omega";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_of_mu_beta() {
        let m = Monomial::from_pairs([("mu", 1), ("beta", 1)]);
        let mut d = m.nontrivial_divisors();
        d.sort();
        let mut want = vec![Monomial::var("mu"), Monomial::var("beta"), m.clone()];
        want.sort();
        assert_eq!(d, want);
        assert_eq!(m.degree(), 2);
        assert_eq!(m.to_string(), "beta*mu");
    }

    #[test]
    fn zero_exponents_are_not_stored() {
        assert_eq!(Monomial::pow("mu", 0), Monomial::one());
        let m = Monomial::pow("mu", 2);
        assert_eq!(m.div(&Monomial::pow("mu", 2)), Some(Monomial::one()));
        assert_eq!(m.div(&Monomial::pow("mu", 3)), None);
    }

    #[test]
    fn derivative_and_eval() {
        let m = Monomial::from_pairs([("mu", 2), ("beta", 1)]);
        let (k, rest) = m.derivative("mu").unwrap();
        assert_eq!(k, 2);
        assert_eq!(rest, Monomial::from_pairs([("mu", 1), ("beta", 1)]));
        let v = m.eval(|n| match n {
            "mu" => Some(0.5),
            "beta" => Some(3.0),
            _ => None,
        });
        assert_eq!(v, 0.75);
    }
}

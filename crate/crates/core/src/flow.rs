//! Amplitude flows `Ȧ = Σ εⁿ Fₙ(A, A*) + Σ ε̇ᵢ Gᵢ(A, A*) + ω̇ H(A, A*)`.

use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::monomial::{Monomial, Rate};
use crate::printer::{eps_factors, format_group, join_groups, AmpTerms, Group};
use crate::rational::RationalComplex;
use crate::series::{FourierSecularSeries, TermKey};

/// Entry tag: the parameter monomial and an optional first-order rate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FlowKey {
    pub eps: Monomial,
    pub rate: Option<Rate>,
}

impl FlowKey {
    pub fn adiabatic(eps: Monomial) -> Self {
        Self { eps, rate: None }
    }

    pub fn with_rate(eps: Monomial, rate: Rate) -> Self {
        Self { eps, rate: Some(rate) }
    }

    /// Printable factors, e.g. `mu^2` or `mu*omega_dot`.
    pub fn factors(&self) -> Vec<String> {
        let mut f = eps_factors(&self.eps, &Monomial::one());
        if let Some(r) = &self.rate {
            f.push(r.to_string());
        }
        f
    }
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.factors();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// `Σ c · ω^k · A^p (A*)^q`, keyed by `(p, q, k)`.
pub type AmpPoly = AmpTerms;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AmplitudeFlow {
    pub entries: BTreeMap<FlowKey, AmpPoly>,
}

impl AmplitudeFlow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: FlowKey, p: u32, q: u32, omega_pow: i32, c: RationalComplex) {
        if c.is_zero() {
            return;
        }
        let poly = self.entries.entry(key.clone()).or_default();
        let slot = poly.entry((p, q, omega_pow)).or_insert_with(RationalComplex::zero);
        *slot += &c;
        if slot.is_zero() {
            poly.remove(&(p, q, omega_pow));
            if poly.is_empty() {
                self.entries.remove(&key);
            }
        }
    }

    pub fn entry(&self, key: &FlowKey) -> Option<&AmpPoly> {
        self.entries.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every monomial has `p − q = 1`, so `Ȧ` rotates like `A`.
    pub fn is_rotation_covariant(&self) -> bool {
        self.entries.values().flat_map(|e| e.keys()).all(|(p, q, _)| *p == *q + 1)
    }

    /// Entries that violate rotation covariance, for diagnostics.
    pub fn covariance_violations(&self) -> Vec<(FlowKey, u32, u32)> {
        let mut out = Vec::new();
        for (k, poly) in &self.entries {
            for (p, q, _) in poly.keys() {
                if *p != *q + 1 {
                    out.push((k.clone(), *p, *q));
                }
            }
        }
        out
    }

    /// The adiabatic entries as a harmonic-free series (rates dropped).
    pub fn adiabatic_series(&self) -> FourierSecularSeries {
        let mut s = FourierSecularSeries::new();
        for (k, poly) in &self.entries {
            if k.rate.is_some() {
                continue;
            }
            for ((p, q, w), c) in poly {
                s.add_term(c.clone(), TermKey::amplitude(0, *p, *q).with_eps(k.eps.clone()).with_omega_pow(*w));
            }
        }
        s
    }

    /// Numeric `Ȧ` at amplitude `A`; `rates` is looked up by parameter name
    /// (`"omega"` for ω̇).
    pub fn eval(
        &self,
        amplitude: Complex64,
        omega: f64,
        params: &dyn Fn(&str) -> Option<f64>,
        rates: &dyn Fn(&str) -> Option<f64>,
    ) -> Complex64 {
        let ac = amplitude.conj();
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, poly) in &self.entries {
            let mut scale = k.eps.eval(params);
            if let Some(r) = &k.rate {
                scale *= rates(r.param_name()).unwrap_or(0.0);
            }
            if scale == 0.0 {
                continue;
            }
            for ((p, q, w), c) in poly {
                let (re, im) = c.to_f64_pair();
                sum += Complex64::new(re, im) * scale * omega.powi(*w) * amplitude.powu(*p) * ac.powu(*q);
            }
        }
        sum
    }

    /// Entries in presentation order: adiabatic by increasing order first,
    /// then the rate entries.
    pub fn ordered(&self) -> impl Iterator<Item = (&FlowKey, &AmpPoly)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            (a.rate.is_some(), a.eps.degree(), &a.rate, &a.eps).cmp(&(
                b.rate.is_some(),
                b.eps.degree(),
                &b.rate,
                &b.eps,
            ))
        });
        v.into_iter()
    }

    /// Canonical text `A_dot = ...`, one entry per line.
    pub fn render(&self) -> String {
        let groups: Vec<Group> = self.ordered().map(|(k, poly)| format_group(&k.factors(), poly, &[])).collect();
        let body = join_groups(&groups);
        format!("A_dot = {}", body.replace('\n', "\n      "))
    }
}

impl fmt::Display for AmplitudeFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancelling_entries_are_removed() {
        let mut f = AmplitudeFlow::new();
        let k = FlowKey::adiabatic(Monomial::var("mu"));
        f.add(k.clone(), 1, 0, 0, RationalComplex::ratio(1, 2));
        f.add(k, 1, 0, 0, RationalComplex::ratio(-1, 2));
        assert!(f.is_empty());
        assert_eq!(f.render(), "A_dot = 0");
    }

    #[test]
    fn covariance_detects_wrong_monomials() {
        let mut f = AmplitudeFlow::new();
        f.add(FlowKey::adiabatic(Monomial::var("mu")), 2, 1, 0, RationalComplex::one());
        assert!(f.is_rotation_covariant());
        f.add(FlowKey::adiabatic(Monomial::var("mu")), 2, 0, 0, RationalComplex::one());
        assert!(!f.is_rotation_covariant());
        assert_eq!(f.covariance_violations().len(), 1);
    }

    #[test]
    fn renders_rate_entries() {
        let mut f = AmplitudeFlow::new();
        f.add(FlowKey::with_rate(Monomial::one(), Rate::Omega), 1, 0, -1, RationalComplex::ratio(-1, 2));
        f.add(FlowKey::with_rate(Monomial::var("mu"), Rate::Omega), 2, 1, -2, RationalComplex::imag_ratio(-1, 4));
        assert_eq!(f.render(), "A_dot = -(1/2)*omega_dot*w^-1*A\n      - (1/4)*i*mu*omega_dot*w^-2*A*|A|^2");
    }
}

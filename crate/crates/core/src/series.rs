//! Fourier–secular series: finite sums of
//! `c · ω^k · (t−t₁)^l · e^{imωt} · A^p (A*)^q · Π εᵢ^{nᵢ} · Π ε̇ᵢ^{dᵢ}`.
//!
//! Harmonics are signed, so the complex-conjugate partner of every term is
//! stored explicitly. Reality of a series is an invariant checked by
//! [`FourierSecularSeries::is_conjugation_closed`], not a representation
//! guarantee.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::rational::BigRational;

use crate::monomial::Monomial;
use crate::rational::RationalComplex;

/// Full exponent key of a term. Field order is the canonical sort order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub eps: Monomial,
    pub eps_dot: Monomial,
    pub harmonic: i32,
    pub t_pow: u32,
    pub p: u32,
    pub q: u32,
    pub omega_pow: i32,
}

impl TermKey {
    /// `e^{imωt}·A^p(A*)^q` with every other exponent zero.
    pub fn amplitude(harmonic: i32, p: u32, q: u32) -> Self {
        Self { eps: Monomial::one(), eps_dot: Monomial::one(), harmonic, t_pow: 0, p, q, omega_pow: 0 }
    }

    pub fn with_eps(mut self, eps: Monomial) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_eps_dot(mut self, eps_dot: Monomial) -> Self {
        self.eps_dot = eps_dot;
        self
    }

    pub fn with_t_pow(mut self, t_pow: u32) -> Self {
        self.t_pow = t_pow;
        self
    }

    pub fn with_omega_pow(mut self, omega_pow: i32) -> Self {
        self.omega_pow = omega_pow;
        self
    }

    /// Key of the complex-conjugate partner.
    pub fn conj(&self) -> Self {
        Self { harmonic: -self.harmonic, p: self.q, q: self.p, ..self.clone() }
    }

    pub fn is_secular(&self) -> bool {
        self.t_pow > 0
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            eps: self.eps.mul(&other.eps),
            eps_dot: self.eps_dot.mul(&other.eps_dot),
            harmonic: self.harmonic + other.harmonic,
            t_pow: self.t_pow + other.t_pow,
            p: self.p + other.p,
            q: self.q + other.q,
            omega_pow: self.omega_pow + other.omega_pow,
        }
    }
}

/// One monomial of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTerm {
    pub key: TermKey,
    pub coeff: RationalComplex,
}

impl SeriesTerm {
    pub fn new(coeff: RationalComplex, key: TermKey) -> Self {
        Self { key, coeff }
    }
}

/// Canonically merged sum of [`SeriesTerm`]s: equal keys are summed and zero
/// coefficients dropped, so two series are equal iff their term maps are.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FourierSecularSeries {
    terms: BTreeMap<TermKey, RationalComplex>,
}

/// Numeric values needed to evaluate a series at a point.
#[derive(Clone)]
pub struct EvalPoint<'a> {
    pub t: f64,
    pub t1: f64,
    pub omega: f64,
    pub amplitude: Complex64,
    pub params: &'a dyn Fn(&str) -> Option<f64>,
    pub rates: &'a dyn Fn(&str) -> Option<f64>,
}

impl FourierSecularSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = SeriesTerm>) -> Self {
        let mut s = Self::new();
        for t in terms {
            s.add_term(t.coeff, t.key);
        }
        s
    }

    /// `A e^{iωt} + A* e^{−iωt}`, the unperturbed solution.
    pub fn bare_amplitude() -> Self {
        Self::from_terms([
            SeriesTerm::new(RationalComplex::one(), TermKey::amplitude(1, 1, 0)),
            SeriesTerm::new(RationalComplex::one(), TermKey::amplitude(-1, 0, 1)),
        ])
    }

    pub fn monomial(coeff: RationalComplex, key: TermKey) -> Self {
        Self::from_terms([SeriesTerm::new(coeff, key)])
    }

    pub fn add_term(&mut self, coeff: RationalComplex, key: TermKey) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &TermKey) -> Option<&RationalComplex> {
        self.terms.get(key)
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &RationalComplex)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> Vec<SeriesTerm> {
        self.terms.iter().map(|(k, c)| SeriesTerm::new(c.clone(), k.clone())).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &RationalComplex) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.terms {
            out.add_term(v * c, k.clone());
        }
        out
    }

    /// Multiplies every term by `ω^k`.
    pub fn times_omega_pow(&self, k: i32) -> Self {
        self.map_keys(|key| {
            let w = key.omega_pow + k;
            key.with_omega_pow(w)
        })
    }

    /// Multiplies every term by a parameter monomial.
    pub fn times_eps(&self, eps: &Monomial) -> Self {
        self.map_keys(|key| {
            let e = key.eps.mul(eps);
            key.with_eps(e)
        })
    }

    pub fn times_eps_dot(&self, eps_dot: &Monomial) -> Self {
        self.map_keys(|key| {
            let e = key.eps_dot.mul(eps_dot);
            key.with_eps_dot(e)
        })
    }

    fn map_keys(&self, f: impl Fn(TermKey) -> TermKey) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.terms {
            out.add_term(v.clone(), f(k.clone()));
        }
        out
    }

    /// Distributive product. Terms of total `ε̇` degree above one are dropped:
    /// only first-order nonadiabaticity is ever represented.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_filtered(other, |_| true)
    }

    /// Product keeping only the terms accepted by `keep`; used to truncate
    /// perturbative orders while multiplying instead of afterwards.
    pub fn mul_filtered(&self, other: &Self, keep: impl Fn(&TermKey) -> bool) -> Self {
        let mut out = Self::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.mul(kb);
                if key.eps_dot.degree() > 1 || !keep(&key) {
                    continue;
                }
                out.add_term(ca * cb, key);
            }
        }
        out
    }

    /// `d/dt` at fixed `t₁`: `l·(t−t₁)^{l−1} + imω·(t−t₁)^l` per term.
    pub fn ddt(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if k.t_pow > 0 {
                let key = k.clone().with_t_pow(k.t_pow - 1);
                out.add_term(c * &RationalComplex::from_int(k.t_pow as i64), key);
            }
            if k.harmonic != 0 {
                let key = k.clone().with_omega_pow(k.omega_pow + 1);
                out.add_term(c * &RationalComplex::imag_ratio(k.harmonic as i64, 1), key);
            }
        }
        out
    }

    /// `∂/∂A` treating `A` and `A*` as independent.
    pub fn d_da(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if k.p > 0 {
                let key = TermKey { p: k.p - 1, ..k.clone() };
                out.add_term(c * &RationalComplex::from_int(k.p as i64), key);
            }
        }
        out
    }

    /// `∂/∂A*` treating `A` and `A*` as independent.
    pub fn d_da_conj(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if k.q > 0 {
                let key = TermKey { q: k.q - 1, ..k.clone() };
                out.add_term(c * &RationalComplex::from_int(k.q as i64), key);
            }
        }
        out
    }

    /// Complex conjugate of the whole series.
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.conj(), c.conj())).collect() }
    }

    /// True when every term's conjugate partner is present with the
    /// conjugate coefficient, i.e. the series is real-valued.
    pub fn is_conjugation_closed(&self) -> bool {
        self.terms.iter().all(|(k, c)| self.terms.get(&k.conj()) == Some(&c.conj()))
    }

    /// Sub-series of terms accepted by `pred`.
    pub fn filter(&self, pred: impl Fn(&TermKey) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (k.clone(), c.clone())).collect() }
    }

    /// Divides every term by `(t−t₁)`, dropping terms without that factor.
    pub fn lower_t_pow(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if k.t_pow > 0 {
                out.add_term(c.clone(), k.clone().with_t_pow(k.t_pow - 1));
            }
        }
        out
    }

    /// Highest power of `(t−t₁)` present, `None` for the empty series.
    pub fn max_t_pow(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.t_pow).max()
    }

    /// Numeric value at a point. Exponentials use `e^{imωt}` with the given
    /// constant ω.
    pub fn eval(&self, at: &EvalPoint<'_>) -> Complex64 {
        self.eval_with_phase(at, at.omega * at.t)
    }

    /// Numeric value with the fast phase `ωt` replaced by an arbitrary
    /// accumulated phase (needed when ω drifts in time).
    pub fn eval_with_phase(&self, at: &EvalPoint<'_>, phase: f64) -> Complex64 {
        let tau = at.t - at.t1;
        let a = at.amplitude;
        let ac = a.conj();
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            let mut v = Complex64::new(re, im);
            v *= at.omega.powi(k.omega_pow);
            v *= tau.powi(k.t_pow as i32);
            v *= a.powu(k.p) * ac.powu(k.q);
            v *= k.eps.eval(at.params);
            v *= k.eps_dot.eval(at.rates);
            v *= Complex64::from_polar(1.0, k.harmonic as f64 * phase);
            sum += v;
        }
        sum
    }
}

/// Convenience constructor for hand-written expected series in tests and
/// golden tables: `num/den · i^imag` as a coefficient.
pub fn coeff(num: i64, den: i64, imaginary: bool) -> RationalComplex {
    if imaginary {
        RationalComplex::imag_ratio(num, den)
    } else {
        RationalComplex::ratio(num, den)
    }
}

/// Adds `term + c.c.` to a series.
pub fn push_with_conj(series: &mut FourierSecularSeries, c: RationalComplex, key: TermKey) {
    let ck = key.conj();
    if ck == key {
        // Self-conjugate keys (m = 0, p = q) carry a real coefficient once.
        series.add_term(RationalComplex::real(&c.re * BigRational::from_integer(2.into())), key);
        return;
    }
    series.add_term(c.conj(), ck);
    series.add_term(c, key);
}

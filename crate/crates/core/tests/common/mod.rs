//! Closed-form references shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rgwb_core::rational::RationalComplex;
use rgwb_core::series::{FourierSecularSeries, SeriesTerm, TermKey};

/// `ÿ + ω²y` applied monomial by monomial. For `c·ω^w·τ^k·e^{imωt}`:
/// `k(k−1)c·ω^w·τ^{k−2} + 2imk·c·ω^{w+1}·τ^{k−1} + (1−m²)c·ω^{w+2}·τ^k`.
pub fn oscillator_residual(y: &FourierSecularSeries, drive: &SeriesTerm) -> BTreeMap<TermKey, RationalComplex> {
    let mut acc: BTreeMap<TermKey, RationalComplex> = BTreeMap::new();
    let mut push = |key: TermKey, c: RationalComplex| {
        let slot = acc.entry(key).or_insert_with(RationalComplex::zero);
        *slot += &c;
    };
    for (key, c) in y.iter() {
        let m = key.harmonic as i64;
        let k = key.t_pow as i64;
        if k >= 2 {
            let kk = key.clone().with_t_pow(key.t_pow - 2);
            push(kk, &RationalComplex::from_int(k * (k - 1)) * c);
        }
        if k >= 1 && m != 0 {
            let kk = key.clone().with_t_pow(key.t_pow - 1).with_omega_pow(key.omega_pow + 1);
            push(kk, &RationalComplex::imag_ratio(2 * m * k, 1) * c);
        }
        if m * m != 1 {
            let kk = key.clone().with_omega_pow(key.omega_pow + 2);
            push(kk, &RationalComplex::from_int(1 - m * m) * c);
        }
    }
    push(drive.key.clone(), &RationalComplex::from_int(-1) * &drive.coeff);
    acc.retain(|_, c| !c.is_zero());
    acc
}

/// A reproducible random single-monomial drive with `|m| ≤ 7`, `l ≤ 4`.
pub fn random_drives(n: usize) -> Vec<SeriesTerm> {
    let strat = (-7i32..=7, 0u32..=4, -60i64..=60, -60i64..=60, 1i64..=24, 0u32..=4, 0u32..=4, -4i32..=4)
        .prop_filter("nonzero", |(_, _, a, b, ..)| *a != 0 || *b != 0)
        .prop_map(|(m, l, a, b, den, p, q, w)| {
            let c = &RationalComplex::ratio(a, den) + &RationalComplex::imag_ratio(b, den);
            SeriesTerm::new(c, TermKey::amplitude(m, p, q).with_t_pow(l).with_omega_pow(w))
        });
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| strat.new_tree(&mut runner).unwrap().current()).collect()
}

/// `χ = 1/(8ω²)` on the VdP cycle.
pub fn vdp_chi(omega: f64) -> f64 {
    1.0 / (8.0 * omega * omega)
}

/// Singular part `χ = 3β/(2μ²ω³)`.
pub fn vdpd_chi(mu: f64, beta: f64, omega: f64) -> f64 {
    1.5 * beta / (mu * mu * omega.powi(3))
}

/// `∮ μ/(8ω²) dω` around `μ = c₁ + δ₁cos φ`, `ω = c₂ + δ₂ sin φ`
/// (periodic trapezoid rule).
pub fn vdp_loop_integral(center: [f64; 2], radii: [f64; 2]) -> f64 {
    let n = 4096;
    (0..n)
        .map(|k| {
            let phi = TAU * k as f64 / n as f64;
            let mu = center[0] + radii[0] * phi.cos();
            let w = center[1] + radii[1] * phi.sin();
            mu / (8.0 * w * w) * radii[1] * phi.cos()
        })
        .sum::<f64>()
        * TAU
        / n as f64
}

pub fn ellipse_area(radii: [f64; 2]) -> f64 {
    PI * radii[0] * radii[1]
}

/// `r(t)` solving `ṙ = (μ/8) r (4 − r²)`: `r²` is logistic with rate `μ`.
pub fn vdp_radius(r0: f64, mu: f64, t: f64) -> f64 {
    let u0 = r0 * r0;
    (4.0 / (1.0 + (4.0 / u0 - 1.0) * (-mu * t).exp())).sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

//! Reference tables for the Van der Pol and Van der Pol–Duffing oscillators,
//! transcribed by hand. The CLI `--golden` flag diffs a derivation against
//! them.

use crate::derivation::Derivation;
use crate::flow::{AmplitudeFlow, FlowKey};
use crate::model::ModelSpec;
use crate::monomial::{Monomial, Rate};
use crate::printer::render_series;
use crate::series::{coeff, push_with_conj, FourierSecularSeries, TermKey};

pub struct GoldenCase {
    pub name: &'static str,
    pub model: ModelSpec,
    /// Adiabatic perturbative solution, conjugate terms included.
    pub solution: FourierSecularSeries,
    /// Flow including the nonadiabatic entries.
    pub flow: AmplitudeFlow,
}

pub const VDP_MODEL: &str = "\
omega = 2 [time_dependent]
param mu = 0.1 [time_dependent]
nonlinearity = mu*(1 - y^2)*ydot
orders = mu, mu^2
vdp_omega_iteration = true
";

pub const VDPD_MODEL: &str = "\
omega = 1
param mu = 0.01 [time_dependent]
param beta = 0.005 [time_dependent]
nonlinearity = mu*(1 - y^2)*ydot - beta*y^3
orders = mu, beta, mu*beta
";

/// `(order, m, l, ω-power, num, den, imaginary, p, q)`; the conjugate is added.
type Row = (&'static str, i32, u32, i32, i64, i64, bool, u32, u32);

fn order(s: &str) -> Monomial {
    match s {
        "" => Monomial::one(),
        "mu" => Monomial::var("mu"),
        "beta" => Monomial::var("beta"),
        "mu^2" => Monomial::pow("mu", 2),
        "mu*beta" => Monomial::from_pairs([("mu", 1), ("beta", 1)]),
        other => panic!("no golden order {other}"),
    }
}

fn series(rows: &[Row]) -> FourierSecularSeries {
    let mut s = FourierSecularSeries::bare_amplitude();
    for &(o, m, l, w, num, den, imag, p, q) in rows {
        let key = TermKey::amplitude(m, p, q).with_eps(order(o)).with_t_pow(l).with_omega_pow(w);
        push_with_conj(&mut s, coeff(num, den, imag), key);
    }
    s
}

/// `(order, rate, ω-power, num, den, imaginary, p, q)`.
type FlowRow = (&'static str, Option<Rate>, i32, i64, i64, bool, u32, u32);

fn flow(rows: Vec<FlowRow>) -> AmplitudeFlow {
    let mut f = AmplitudeFlow::new();
    for (o, rate, w, num, den, imag, p, q) in rows {
        f.add(FlowKey { eps: order(o), rate }, p, q, w, coeff(num, den, imag));
    }
    f
}

pub fn vdp() -> GoldenCase {
    let solution = series(&[
        // y1
        ("mu", 1, 1, 0, 1, 2, false, 1, 0),
        ("mu", 1, 1, 0, -1, 2, false, 2, 1),
        ("mu", 3, 0, -1, 1, 8, true, 3, 0),
        // y2, prime frequency
        ("mu^2", 1, 1, -1, -2, 16, true, 1, 0),
        ("mu^2", 1, 1, -1, 8, 16, true, 2, 1),
        ("mu^2", 1, 1, -1, -7, 16, true, 3, 2),
        ("mu^2", 1, 2, 0, 1, 8, false, 1, 0),
        ("mu^2", 1, 2, 0, -4, 8, false, 2, 1),
        ("mu^2", 1, 2, 0, 3, 8, false, 3, 2),
        // y2, third harmonic
        ("mu^2", 3, 0, -2, -2, 64, false, 3, 0),
        ("mu^2", 3, 0, -2, -1, 64, false, 4, 1),
        ("mu^2", 3, 1, -1, 3, 16, true, 3, 0),
        ("mu^2", 3, 1, -1, -3, 16, true, 4, 1),
        // y2, fifth harmonic
        ("mu^2", 5, 0, -2, -5, 192, false, 5, 0),
    ]);
    let mu_dot = || Some(Rate::Param("mu".into()));
    let flow = flow(vec![
        ("mu", None, 0, 1, 2, false, 1, 0),
        ("mu", None, 0, -1, 2, false, 2, 1),
        ("mu^2", None, -1, -2, 16, true, 1, 0),
        ("mu^2", None, -1, 8, 16, true, 2, 1),
        ("mu^2", None, -1, -7, 16, true, 3, 2),
        ("", mu_dot(), -1, 1, 4, true, 1, 0),
        ("", mu_dot(), -1, -1, 4, true, 2, 1),
        ("", Some(Rate::Omega), -1, -1, 2, false, 1, 0),
        ("mu", Some(Rate::Omega), -2, -1, 4, true, 2, 1),
    ]);
    GoldenCase { name: "vdp", model: ModelSpec::parse(VDP_MODEL).expect("built-in model"), solution, flow }
}

pub fn vdpd() -> GoldenCase {
    let solution = series(&[
        // y10
        ("mu", 1, 1, 0, 1, 2, false, 1, 0),
        ("mu", 1, 1, 0, -1, 2, false, 2, 1),
        ("mu", 3, 0, -1, 1, 8, true, 3, 0),
        // y01
        ("beta", 1, 1, -1, 3, 2, true, 2, 1),
        ("beta", 3, 0, -2, 1, 8, false, 3, 0),
        // y11, prime frequency
        ("mu*beta", 1, 1, -2, -3, 4, false, 2, 1),
        ("mu*beta", 1, 1, -2, 2, 4, false, 3, 2),
        ("mu*beta", 1, 2, -1, 3, 2, true, 2, 1),
        ("mu*beta", 1, 2, -1, -3, 2, true, 3, 2),
        // y11, third harmonic
        ("mu*beta", 3, 0, -3, 3, 32, true, 3, 0),
        ("mu*beta", 3, 0, -3, -6, 32, true, 4, 1),
        ("mu*beta", 3, 1, -2, 3, 16, false, 3, 0),
        ("mu*beta", 3, 1, -2, -12, 16, false, 4, 1),
        // y11, fifth harmonic
        ("mu*beta", 5, 0, -3, 1, 24, true, 5, 0),
    ]);
    let mu_dot = || Some(Rate::Param("mu".into()));
    let flow = flow(vec![
        ("mu", None, 0, 1, 2, false, 1, 0),
        ("mu", None, 0, -1, 2, false, 2, 1),
        ("beta", None, -1, 3, 2, true, 2, 1),
        ("mu*beta", None, -2, -3, 4, false, 2, 1),
        ("mu*beta", None, -2, 2, 4, false, 3, 2),
        ("", mu_dot(), -1, 1, 4, true, 1, 0),
        ("", mu_dot(), -1, -1, 4, true, 2, 1),
        ("", Some(Rate::Param("beta".into())), -2, -3, 4, false, 2, 1),
    ]);
    GoldenCase { name: "vdpd", model: ModelSpec::parse(VDPD_MODEL).expect("built-in model"), solution, flow }
}

pub fn all() -> Vec<GoldenCase> {
    vec![vdp(), vdpd()]
}

/// The table whose nonlinearity and order lattice match the model, if any.
pub fn lookup(model: &ModelSpec) -> Option<GoldenCase> {
    all().into_iter().find(|g| g.model.nonlinearity == model.nonlinearity && g.model.orders == model.orders)
}

/// Line-oriented differences between a derivation and a table; empty on a
/// match. Flow entries are compared only for rates the model declares.
pub fn diff(case: &GoldenCase, derivation: &Derivation) -> Vec<String> {
    let mut out = Vec::new();
    let extra = derivation.solution.sub(&case.solution);
    if !extra.is_empty() {
        out.push(format!("solution differs from the {} table by:\n{}", case.name, render_series(&extra)));
    }
    let mut expected = AmplitudeFlow::new();
    for (k, poly) in &case.flow.entries {
        if derivation.flow.entry(k).is_none() && k.rate.is_some() {
            continue;
        }
        for ((p, q, w), c) in poly {
            expected.add(k.clone(), *p, *q, *w, c.clone());
        }
    }
    for (k, poly) in derivation.flow.entries.iter().chain(expected.entries.iter()) {
        if derivation.flow.entry(k) != expected.entry(k) {
            let got = derivation.flow.entry(k).map(|p| format!("{p:?}")).unwrap_or_else(|| "none".into());
            let line = format!("flow entry {k}: expected {:?}, derived {got}", poly);
            if !out.contains(&line) {
                out.push(line);
            }
        }
    }
    out
}

//! One line per acceptance criterion; exits nonzero if any fails.
//! `cargo test -p rgwb-core --test acceptance`

mod common;

use std::time::{Duration as Elapsed, Instant};

use rayon::prelude::*;

use rgwb_core::derivation::derive;
use rgwb_core::geometry::{Geometry, Mode};
use rgwb_core::golden;
use rgwb_core::model::ModelSpec;
use rgwb_core::monomial::Monomial;
use rgwb_core::oscillator::solve_particular;
use rgwb_core::polar::{polar_form, ParamValues};
use rgwb_core::protocol::CycleProtocol;
use rgwb_core::schedule::{Path, Schedule};
use rgwb_core::series::TermKey;
use rgwb_core::simulator::{flow_integrate, integrate, renormalized_residual, Experiment, Oscillator};

use common::rel;

const VDP_THETA: f64 = 1.98e-4;
const VDPD_THETA: f64 = 1.31e-4;
const THETA_TOL: f64 = 0.10;
const FAMILY_TOL: f64 = 0.15;
const CROSS_TOL: f64 = 0.05;
const SLOPE_TOL: f64 = 0.2;
const CHI_VDP_TOL: f64 = 1e-6;
const CHI_VDPD_TOL: f64 = 1e-4;
const INVARIANT_TOL: f64 = 1e-10;
const E_OVER_OMEGA_TOL: f64 = 0.01;
/// Slack on the monotone approach to the plateau, relative to `VDP_THETA`.
const MONOTONE_SLACK: f64 = 1e-3;
const FAST: Elapsed = Elapsed::from_secs(1);
const PER_POINT: Elapsed = Elapsed::from_secs(600);

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Elapsed,
}

fn check(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    Outcome { name, pass, detail, elapsed: t.elapsed() }
}

fn vdp_with_mu(mu: f64) -> ModelSpec {
    ModelSpec::parse(&golden::VDP_MODEL.replace("mu = 0.1", &format!("mu = {mu}"))).unwrap()
}

fn vdpd_with(mu: f64, beta: f64) -> ModelSpec {
    let text = golden::VDPD_MODEL
        .replace("mu = 0.01", &format!("mu = {mu}"))
        .replace("beta = 0.005", &format!("beta = {beta}"));
    ModelSpec::parse(&text).unwrap()
}

fn vdp_protocol() -> CycleProtocol {
    CycleProtocol::parse("loop = mu, omega\nradii = 0.01, 0.2\nomega0T = 2e5\n").unwrap()
}

fn vdpd_protocol() -> CycleProtocol {
    CycleProtocol::parse("loop = mu, beta\nradii = 0.0005, 0.001\nomega0T = 1e5\n").unwrap()
}

/// θ from the simulation at the protocol's own duration, plus wall time.
fn simulate(model: &ModelSpec, p: &CycleProtocol, omega0_t: f64) -> (f64, Elapsed) {
    let t = Instant::now();
    let e = Experiment::new(model, p).unwrap();
    let theta = e.run_cycle_pair(omega0_t / e.omega0).unwrap().theta;
    (theta, t.elapsed())
}

fn max_pairwise(xs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            worst = worst.max(rel(*a, *b));
        }
    }
    worst
}

fn golden_suite() -> (bool, String) {
    let t = Instant::now();
    let mut diffs = 0;
    for case in golden::all() {
        diffs += golden::diff(&case, &derive(&case.model).unwrap()).len();
    }
    let d = derive(&ModelSpec::parse(golden::VDP_MODEL).unwrap()).unwrap();
    let key = TermKey::amplitude(5, 5, 0).with_eps(Monomial::pow("mu", 2)).with_omega_pow(-2);
    let fifth = d.solution.coeff(&key) == Some(&rgwb_core::rational::RationalComplex::ratio(-5, 192));
    let el = t.elapsed();
    (diffs == 0 && fifth && el < FAST, format!("{diffs} table differences, -(5/192)A^5 term present: {fifth}"))
}

fn particular_suite() -> (bool, String) {
    let t = Instant::now();
    let drives = common::random_drives(200);
    let mut bad = 0;
    for d in &drives {
        let y = solve_particular(d);
        let deg_ok = match (d.key.harmonic.abs() == 1, y.max_t_pow()) {
            (true, Some(k)) => k == d.key.t_pow + 1 && y.iter().all(|(k, _)| k.t_pow > 0),
            (false, Some(k)) => k == d.key.t_pow,
            _ => false,
        };
        if !deg_ok || !common::oscillator_residual(&y, d).is_empty() {
            bad += 1;
        }
    }
    (bad == 0 && t.elapsed() < FAST, format!("{bad}/{} drives fail the identity or degree law", drives.len()))
}

fn geometry_suite() -> (bool, String) {
    let t = Instant::now();
    let sys = polar_form(&golden::vdp().flow).unwrap();
    let g = Geometry::new(&sys, ["mu".into(), "omega".into()], ParamValues::new());
    let chi1 = g.curvature([0.1, 2.0], 1e-4).unwrap().chi;
    let sys = polar_form(&golden::vdpd().flow).unwrap();
    let g = Geometry::new(&sys, ["mu".into(), "beta".into()], [("omega".to_string(), 1.0)].into())
        .with_mode(Mode::SingularOnly);
    let chi2 = g.curvature([0.01, 0.005], 1e-4).unwrap().chi;
    let e1 = rel(chi1, common::vdp_chi(2.0));
    let e2 = rel(chi2, common::vdpd_chi(0.01, 0.005, 1.0));
    (
        e1 <= CHI_VDP_TOL && e2 <= CHI_VDPD_TOL && t.elapsed() < FAST,
        format!("chi_vdp = {chi1:.10} (rel {e1:.1e}), chi_vdpd = {chi2:.6} (rel {e2:.1e})"),
    )
}

fn vdp_loop() -> (bool, String) {
    let p = vdp_protocol();
    let m = vdp_with_mu(0.1);
    let sweep = [1e3, 3e3, 1e4, 3e4, 1e5, 2e5];
    let runs: Vec<(f64, Elapsed)> = sweep.par_iter().map(|&x| simulate(&m, &p, x)).collect();
    let thetas: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let theta = thetas[thetas.len() - 1];
    let at_point = rel(theta, VDP_THETA) <= THETA_TOL;
    let dist: Vec<f64> = thetas.iter().map(|t| (t - VDP_THETA).abs()).collect();
    let monotone = dist.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK * VDP_THETA);
    let plateau = rel(thetas[thetas.len() - 2], theta) < 0.05;
    let mus: Vec<(f64, Elapsed)> = [0.05, 0.2].par_iter().map(|&mu| simulate(&vdp_with_mu(mu), &p, 2e5)).collect();
    let family = [theta, mus[0].0, mus[1].0];
    let spread = max_pairwise(&family);
    let slowest = runs.iter().chain(&mus).map(|r| r.1).max().unwrap();
    (
        at_point && monotone && plateau && spread <= FAMILY_TOL && slowest <= PER_POINT,
        format!(
            "theta(2e5) = {theta:.4e} (rel {:.3}), monotone {monotone}, plateau {plateau}, mu 0.05/0.2 = {:.4e}/{:.4e} spread {spread:.3}, slowest point {:.1} s",
            rel(theta, VDP_THETA),
            mus[0].0,
            mus[1].0,
            slowest.as_secs_f64()
        ),
    )
}

fn vdpd_loop() -> (bool, String) {
    let p = vdpd_protocol();
    let points = [(0.01, 0.005), (0.015, 0.01125), (0.02, 0.02), (0.025, 0.03125)];
    let runs: Vec<(f64, Elapsed)> = points.par_iter().map(|&(mu, b)| simulate(&vdpd_with(mu, b), &p, 1e5)).collect();
    let theta = runs[0].0;
    let family: Vec<f64> = runs[1..].iter().map(|r| r.0).collect();
    let spread = max_pairwise(&family);
    let slowest = runs.iter().map(|r| r.1).max().unwrap();
    (
        rel(theta, VDPD_THETA) <= THETA_TOL && spread <= FAMILY_TOL && slowest <= PER_POINT,
        format!(
            "theta(1e5) = {theta:.4e} (rel {:.3}), family {:.4e}/{:.4e}/{:.4e} spread {spread:.3}, slowest point {:.1} s",
            rel(theta, VDPD_THETA),
            family[0],
            family[1],
            family[2],
            slowest.as_secs_f64()
        ),
    )
}

fn cross_oracle() -> (bool, String) {
    let cases = [(vdp_with_mu(0.1), vdp_protocol(), 2e5), (vdpd_with(0.01, 0.005), vdpd_protocol(), 1e5)];
    let errs: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .map(|(m, p, x)| {
            let e = Experiment::new(m, p).unwrap();
            let period = x / e.omega0;
            let sim = e.run_cycle_pair(period).unwrap().theta;
            let flow = e.flow_phase(period).unwrap();
            (sim, flow, rel(sim, flow))
        })
        .collect();
    (
        errs.iter().all(|e| e.2 <= CROSS_TOL),
        format!(
            "vdp sim {:.4e} flow {:.4e} (rel {:.3}); vdpd sim {:.4e} flow {:.4e} (rel {:.3})",
            errs[0].0, errs[0].1, errs[0].2, errs[1].0, errs[1].1, errs[1].2
        ),
    )
}

fn residual_scaling() -> (bool, String) {
    let mus = [0.02, 0.04, 0.08, 0.16];
    let res: Vec<f64> =
        mus.par_iter().map(|&mu| renormalized_residual(&vdp_with_mu(mu), 2.0, 0.0, 20.0, 400).unwrap()).collect();
    let slope = common::log_log_slope(&mus, &res);
    let shown: Vec<String> = res.iter().map(|r| format!("{r:.2e}")).collect();
    ((slope - 3.0).abs() <= SLOPE_TOL, format!("slope {slope:.3} (residuals {})", shown.join(", ")))
}

fn adiabatic_invariant() -> (bool, String) {
    let m = ModelSpec::parse("omega = 2 [time_dependent]\nparam eps = 0\n").unwrap();
    let sys = polar_form(&derive(&m).unwrap().flow).unwrap();
    // ω₀T = 1e4 with ω₀ = 2
    let duration = 5e3;
    let mut s = Schedule::constant(&m).unwrap();
    s.set("omega", Path::Ramp { from: 2.0, to: 3.0, t0: 0.0, duration }).unwrap();
    let flow = flow_integrate(&sys, &s, (0.0, duration), [1.0, 0.0], 1e-12).unwrap();
    let inv = |t: f64, r: f64| r * r * s.omega(t) / 4.0;
    let i0 = inv(0.0, 1.0);
    let mut flow_drift: f64 = 0.0;
    for k in 0..=1000 {
        let t = duration * k as f64 / 1000.0;
        flow_drift = flow_drift.max((inv(t, flow.eval(t).unwrap()[0]) - i0).abs() / i0);
    }
    let traj = integrate(&m, &s, (0.0, duration), 1e-11, [1.0, 0.0]).unwrap();
    let osc = Oscillator::new(&m, s.clone()).unwrap();
    let e0 = osc.energy(0.0, &[1.0, 0.0]) / 2.0;
    let mut sim_drift: f64 = 0.0;
    for st in &traj.steps {
        sim_drift = sim_drift.max((osc.energy(st.t1, &st.y1) / s.omega(st.t1) - e0).abs() / e0);
    }
    (
        flow_drift <= INVARIANT_TOL && sim_drift < E_OVER_OMEGA_TOL,
        format!("|A|^2 omega drift {flow_drift:.1e}, simulated E/omega drift {sim_drift:.1e}"),
    )
}

fn main() {
    let outcomes = [
        check("symbolic golden suite", golden_suite),
        check("particular-solution property suite", particular_suite),
        check("geometry curvature", geometry_suite),
        check("VdP loop phase", vdp_loop),
        check("VdPD loop phase", vdpd_loop),
        check("cross-oracle flow vs simulation", cross_oracle),
        check("residual scaling", residual_scaling),
        check("adiabatic invariant", adiabatic_invariant),
    ];
    for o in &outcomes {
        println!(
            "{} {:<38} {} [{:.2} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.elapsed.as_secs_f64()
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

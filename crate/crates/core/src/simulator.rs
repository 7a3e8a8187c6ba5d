//! Direct integration of `ÿ + ω(t)²y = Σᵢ εᵢ(t) fᵢ(y, ẏ)` and the two-orientation
//! loop-phase measurement, with the RG flow as a cheap cross-check.

use std::f64::consts::{PI, TAU};

use num::complex::Complex64;
use rayon::prelude::*;

use crate::derivation::{derive, render_solution, DerivationError};
use crate::geometry::{Ellipse, Geometry, GeometryError, Mode};
use crate::model::ModelSpec;
use crate::monomial::OMEGA;
use crate::ode::{Dop853, OdeError, Options, Step};
use crate::polar::{polar_form, Equation, ParamValues, PolarRGSystem, Probe};
use crate::protocol::{CycleProtocol, Duration, Orientation, TOL_RANGE};
use crate::rational::rational_to_f64;
use crate::schedule::{Path, Schedule, ScheduleError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid protocol: {0}")]
    Protocol(String),
    #[error("tol {0:e} outside [1e-13, 1e-6]")]
    Tol(f64),
    #[error("crossing mismatch: the ccw run measures crossing #{ccw}, the nearest cw crossing is #{cw}")]
    CrossingMismatch { ccw: usize, cw: usize },
    #[error("no upward zero crossing found after t = {0}")]
    NoCrossing(f64),
}

/// The model's right-hand side with its schedule, compiled to floats.
#[derive(Clone, Debug)]
pub struct Oscillator {
    schedule: Schedule,
    /// `(path index, coefficient, y power, ẏ power)`.
    terms: Vec<(usize, f64, i32, i32)>,
}

impl Oscillator {
    pub fn new(model: &ModelSpec, schedule: Schedule) -> Result<Self, SimError> {
        let mut terms = Vec::new();
        for ((param, a, b), c) in &model.nonlinearity.terms {
            let i = schedule.index(param).ok_or_else(|| ScheduleError::UnknownParam(param.clone()))?;
            terms.push((i, rational_to_f64(c), *a as i32, *b as i32));
        }
        Ok(Self { schedule, terms })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn rhs(&self, t: f64, s: &[f64; 2]) -> [f64; 2] {
        let [y, v] = *s;
        let w = self.schedule.paths[0].value(t);
        let mut force = -w * w * y;
        for &(i, c, a, b) in &self.terms {
            force += self.schedule.paths[i].value(t) * c * y.powi(a) * v.powi(b);
        }
        [v, force]
    }

    /// `(ẏ² + ω²y²)/2`.
    pub fn energy(&self, t: f64, s: &[f64; 2]) -> f64 {
        let w = self.schedule.omega(t);
        0.5 * (s[1] * s[1] + w * w * s[0] * s[0])
    }
}

/// Accepted steps of one integration; evaluable anywhere in its span.
#[derive(Clone, Debug, Default)]
pub struct Trajectory<const N: usize> {
    pub steps: Vec<Step<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.steps.first()?.t0, self.steps.last()?.t1))
    }

    pub fn step_at(&self, t: f64) -> Option<&Step<N>> {
        let (a, b) = self.span()?;
        if !(a..=b).contains(&t) {
            return None;
        }
        let i = self.steps.partition_point(|s| s.t1 < t);
        self.steps.get(i)
    }

    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        self.step_at(t).map(|s| s.eval(t))
    }

    pub fn last(&self) -> Option<[f64; N]> {
        self.steps.last().map(|s| s.y1)
    }

    /// Upward zero crossings of component `i`, in time order.
    pub fn upward_crossings(&self, i: usize) -> Vec<f64> {
        self.steps.iter().flat_map(|s| s.upward_crossings(i, CROSSING_SAMPLES)).collect()
    }
}

const CROSSING_SAMPLES: usize = 4;

fn check_tol(tol: f64) -> Result<(), SimError> {
    if (TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        Ok(())
    } else {
        Err(SimError::Tol(tol))
    }
}

fn options(tol: f64, omega: f64) -> Options {
    // At most a quarter period per step so every crossing is bracketed.
    Options::tol(tol).with_h_max(0.25 * TAU / omega.abs().max(1e-300))
}

/// Dense `(y, ẏ)` trajectory over `t_span` from `y0`.
pub fn integrate(
    model: &ModelSpec,
    schedule: &Schedule,
    t_span: (f64, f64),
    tol: f64,
    y0: [f64; 2],
) -> Result<Trajectory<2>, SimError> {
    check_tol(tol)?;
    let osc = Oscillator::new(model, schedule.clone())?;
    let mut ode = Dop853::new(|t, y: &[f64; 2]| osc.rhs(t, y), t_span.0, y0, options(tol, schedule.omega(t_span.0)));
    let mut traj = Trajectory::default();
    ode.run(t_span.1, |s| {
        traj.steps.push(*s);
        true
    })?;
    Ok(traj)
}

/// `(r, θ)` trajectory of the polar RG flow under `schedule`.
pub fn flow_integrate(
    sys: &PolarRGSystem,
    schedule: &Schedule,
    t_span: (f64, f64),
    r_theta0: [f64; 2],
    tol: f64,
) -> Result<Trajectory<2>, SimError> {
    check_tol(tol)?;
    let rhs = |t: f64, s: &[f64; 2]| {
        let vals = schedule.values_at(t);
        let rates = schedule.rates_at(t);
        let (rd, td) = sys.rates_at(s[0], &vals, &|n| rates.get(n).copied().unwrap_or(0.0));
        [rd, td]
    };
    let mut ode = Dop853::new(rhs, t_span.0, r_theta0, Options::tol(tol));
    let mut traj = Trajectory::default();
    ode.run(t_span.1, |s| {
        traj.steps.push(*s);
        true
    })?;
    Ok(traj)
}

/// `(r, θ)` of `y = r cos(ωt + θ)` matching `(y, ẏ)` at `t = 0`.
pub fn polar_initial(y0: [f64; 2], omega: f64) -> [f64; 2] {
    let v = y0[1] / omega;
    [y0[0].hypot(v), (-v).atan2(y0[0])]
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMeasurement {
    pub period: f64,
    pub omega0: f64,
    /// Upward crossings counted from loop start, shared by both runs.
    pub crossing_index: usize,
    pub t_plus: f64,
    pub t_minus: f64,
    pub theta: f64,
}

impl PhaseMeasurement {
    pub fn omega0_t(&self) -> f64 {
        self.omega0 * self.period
    }
}

/// A model plus loop protocol with every default resolved.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub model: ModelSpec,
    pub sys: PolarRGSystem,
    pub protocol: CycleProtocol,
    pub mode: Mode,
    pub start: [f64; 2],
    pub omega0: f64,
    /// Relaxation rate `|∂f/∂r|` on the cycle at the loop start.
    pub lambda: f64,
    pub radius: f64,
    pub relax_time: f64,
    pub settle_time: f64,
}

pub const RELAX_UNITS: f64 = 20.0;
pub const SETTLE_UNITS: f64 = 10.0;
pub const MIN_RELAX_UNITS: f64 = 10.0;

impl Experiment {
    pub fn new(model: &ModelSpec, protocol: &CycleProtocol) -> Result<Self, SimError> {
        protocol.check().map_err(SimError::Protocol)?;
        let derivation = derive(model)?;
        let sys = polar_form(&derivation.flow)?;
        Self::with_system(model, sys, protocol)
    }

    pub fn with_system(model: &ModelSpec, sys: PolarRGSystem, protocol: &CycleProtocol) -> Result<Self, SimError> {
        protocol.check().map_err(SimError::Protocol)?;
        for name in &protocol.loop_params {
            let td = if name == OMEGA {
                model.omega.time_dependent
            } else {
                model.param(name).ok_or_else(|| ScheduleError::UnknownParam(name.clone()))?.time_dependent
            };
            if !td {
                return Err(SimError::Protocol(format!("loop parameter `{name}` is not declared [time_dependent]")));
            }
        }
        let start = match protocol.start {
            Some(s) => s,
            None => {
                let get = |n: &str| model.value(n).ok_or_else(|| ScheduleError::MissingValue(n.into()));
                [get(&protocol.loop_params[0])?, get(&protocol.loop_params[1])?]
            }
        };
        let mut exp = Self {
            model: model.clone(),
            sys,
            protocol: protocol.clone(),
            mode: Mode::Full,
            start,
            omega0: 0.0,
            lambda: 0.0,
            radius: 0.0,
            relax_time: 0.0,
            settle_time: 0.0,
        };
        let base = exp.base_schedule()?;
        exp.omega0 = base.omega(0.0);
        let vals = base.values_at(0.0);
        let geo = exp.geometry(vals.clone());
        exp.radius = geo.limit_cycle_radius(start)?;
        exp.lambda = exp.sys.probe(Probe::value(Equation::R).dr(1), exp.radius, &vals).abs();
        exp.relax_time = protocol.relax_time.unwrap_or(RELAX_UNITS / exp.lambda);
        exp.settle_time = protocol.settle_time.unwrap_or(SETTLE_UNITS / exp.lambda);
        if exp.relax_time * exp.lambda < MIN_RELAX_UNITS {
            return Err(SimError::Protocol(format!(
                "relax_time {} is shorter than {MIN_RELAX_UNITS} relaxation times (1/λ = {})",
                exp.relax_time,
                1.0 / exp.lambda
            )));
        }
        Ok(exp)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    fn names(&self) -> [&str; 2] {
        [&self.protocol.loop_params[0], &self.protocol.loop_params[1]]
    }

    /// Model values with the loop parameters at `start`.
    pub fn base_schedule(&self) -> Result<Schedule, SimError> {
        let mut s =
            Schedule::constant_with(&self.model, |n| self.names().iter().position(|m| *m == n).map(|i| self.start[i]))?;
        for (i, n) in self.names().into_iter().enumerate() {
            s.set(n, Path::Constant(self.start[i]))?;
        }
        Ok(s)
    }

    pub fn period(&self, d: Duration) -> f64 {
        d.period(self.omega0)
    }

    pub fn loop_start(&self) -> f64 {
        self.relax_time
    }

    /// Time of the measured crossing search: loop end plus settling.
    pub fn measure_time(&self, period: f64) -> f64 {
        self.relax_time + period + self.settle_time
    }

    pub fn schedule(&self, period: f64, orientation: Orientation) -> Result<Schedule, SimError> {
        Ok(self.base_schedule()?.with_loop(
            self.names(),
            self.start,
            self.protocol.radii,
            self.relax_time,
            period,
            orientation.sign(),
        )?)
    }

    fn geometry(&self, base: ParamValues) -> Geometry<'_> {
        let names = self.protocol.loop_params.clone();
        Geometry::new(&self.sys, names, base).with_mode(self.mode)
    }

    /// The traced ellipse, oriented like the protocol's plus run.
    pub fn ellipse(&self) -> Ellipse {
        let [d1, d2] = self.protocol.radii;
        Ellipse {
            center: [self.start[0] - d1, self.start[1]],
            radii: [d1, d2],
            orientation: self.protocol.orientation.sign(),
        }
    }

    /// `s·π·δ₁δ₂·χ` at the ellipse center.
    pub fn predicted_phase(&self) -> Result<f64, SimError> {
        let geo = self.geometry(self.base_schedule()?.values_at(0.0));
        Ok(geo.predicted_loop_phase(&self.ellipse())?)
    }

    /// `∮ a·dε` around the traced ellipse.
    pub fn loop_integral(&self) -> Result<f64, SimError> {
        let geo = self.geometry(self.base_schedule()?.values_at(0.0));
        Ok(geo.loop_integral(&self.ellipse())?)
    }

    /// Upward crossings after the loop starts, numbered from 1, handed to
    /// `visit` until it returns `false`.
    fn crossings(
        &self,
        period: f64,
        orientation: Orientation,
        horizon: f64,
        mut visit: impl FnMut(usize, f64) -> bool,
    ) -> Result<(), SimError> {
        let osc = Oscillator::new(&self.model, self.schedule(period, orientation)?)?;
        let t_loop = self.loop_start();
        let mut ode = Dop853::new(
            |t, y: &[f64; 2]| osc.rhs(t, y),
            0.0,
            self.protocol.initial,
            options(self.protocol.tol, self.omega0),
        );
        let mut k = 0;
        let mut done = false;
        while ode.t < horizon && !done {
            ode.step(horizon)?;
            let (_, y0) = ode.previous();
            // Steps span at most a quarter period, so a sign change brackets
            // the only crossing.
            if ode.t <= t_loop || !(y0[0] < 0.0 && ode.y[0] >= 0.0) {
                continue;
            }
            for t in ode.dense().upward_crossings(0, 1) {
                if t > t_loop {
                    k += 1;
                    if !visit(k, t) {
                        done = true;
                    }
                }
            }
        }
        if done {
            Ok(())
        } else {
            Err(SimError::NoCrossing(horizon))
        }
    }

    /// Crossings `(index, time)` of one orientation within a few periods of
    /// the measurement time.
    fn crossings_near_measurement(&self, period: f64, orientation: Orientation) -> Result<Vec<(usize, f64)>, SimError> {
        let t_meas = self.measure_time(period);
        let p = TAU / self.omega0;
        let (lo, hi) = (t_meas - 2.0 * p, t_meas + 3.0 * p);
        let mut out = Vec::new();
        self.crossings(period, orientation, hi + 50.0 * p, |k, t| {
            if t >= lo {
                out.push((k, t));
            }
            t < hi
        })?;
        Ok(out)
    }

    /// Both orientations with identical initial data; `θ = ω₀(t₋ − t₊)/2`
    /// where the plus run follows the protocol orientation. The ccw run
    /// fixes the crossing (first at or after the measurement time); the cw
    /// run must reach the same crossing index within half a period of it.
    pub fn run_cycle_pair(&self, period: f64) -> Result<PhaseMeasurement, SimError> {
        let (ccw, cw) = rayon::join(
            || self.crossings_near_measurement(period, Orientation::Ccw),
            || self.crossings_near_measurement(period, Orientation::Cw),
        );
        let (ccw, cw) = (ccw?, cw?);
        let t_meas = self.measure_time(period);
        let &(k, t_ccw) = ccw.iter().find(|(_, t)| *t >= t_meas).ok_or(SimError::NoCrossing(t_meas))?;
        let &(k_cw, t_cw) = cw
            .iter()
            .min_by(|a, b| (a.1 - t_ccw).abs().total_cmp(&(b.1 - t_ccw).abs()))
            .ok_or(SimError::NoCrossing(t_meas))?;
        if k_cw != k || (t_cw - t_ccw).abs() > PI / self.omega0 {
            return Err(SimError::CrossingMismatch { ccw: k, cw: k_cw });
        }
        let (t_plus, t_minus) = match self.protocol.orientation {
            Orientation::Ccw => (t_ccw, t_cw),
            Orientation::Cw => (t_cw, t_ccw),
        };
        Ok(PhaseMeasurement {
            period,
            omega0: self.omega0,
            crossing_index: k,
            t_plus,
            t_minus,
            theta: self.omega0 * (t_minus - t_plus) / 2.0,
        })
    }

    /// `run_cycle_pair` for every duration, in parallel; sorted by period,
    /// failures kept per entry.
    pub fn sweep(&self, durations: &[Duration]) -> Vec<(f64, Result<PhaseMeasurement, SimError>)> {
        let mut out: Vec<_> = durations
            .par_iter()
            .map(|d| {
                let period = self.period(*d);
                (period, self.run_cycle_pair(period))
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// Final `(r, θ)` of the flow over the full protocol in one orientation.
    pub fn flow_final(&self, period: f64, orientation: Orientation) -> Result<[f64; 2], SimError> {
        let sched = self.schedule(period, orientation)?;
        let init = polar_initial(self.protocol.initial, self.omega0);
        let traj = flow_integrate(&self.sys, &sched, (0.0, self.measure_time(period)), init, self.protocol.tol)?;
        Ok(traj.last().unwrap_or(init))
    }

    /// `(θ₊ − θ₋)/2` from the RG flow.
    pub fn flow_phase(&self, period: f64) -> Result<f64, SimError> {
        let plus = self.flow_final(period, self.protocol.orientation)?;
        let minus = self.flow_final(period, self.protocol.orientation.reversed())?;
        Ok((plus[1] - minus[1]) / 2.0)
    }
}

/// CSV header for [`csv_row`].
pub const CSV_HEADER: &str = "T,omega0T,theta_plus_run_crossing,t_plus,t_minus,theta,theta_geom_pred,rel_err";

pub fn csv_row(m: &PhaseMeasurement, predicted: f64) -> String {
    let rel = if predicted == 0.0 { f64::NAN } else { (m.theta - predicted) / predicted };
    format!(
        "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
        m.period,
        m.omega0_t(),
        m.crossing_index,
        m.t_plus,
        m.t_minus,
        m.theta,
        predicted,
        rel
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub a: &'static str,
    pub b: &'static str,
    pub rel_err: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub period: f64,
    pub theta_sim: f64,
    pub theta_sim_half: f64,
    pub theta_flow: f64,
    pub theta_pred: f64,
    pub plateau_change: f64,
    pub plateau_ok: bool,
    pub pairs: Vec<PairCheck>,
}

pub const PLATEAU_TOL: f64 = 0.05;
pub const DEFAULT_AGREEMENT: f64 = 0.10;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.plateau_ok && self.pairs.iter().all(|p| p.pass)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "T = {:.6e}\ntheta_sim  = {:.6e}\ntheta_flow = {:.6e}\ntheta_pred = {:.6e}\n",
            self.period, self.theta_sim, self.theta_flow, self.theta_pred
        );
        for p in &self.pairs {
            let tag = if p.pass { "ok" } else { "FAIL" };
            s += &format!("{} vs {}: rel_err {:.3e} {tag}\n", p.a, p.b, p.rel_err);
        }
        if self.plateau_ok {
            s += &format!("plateau: theta(T/2) within {:.3e} of theta(T) ok\n", self.plateau_change);
        } else {
            s += &format!(
                "not at plateau: theta(T/2) = {:.6e} differs from theta(T) by {:.3e} (limit {PLATEAU_TOL})\n",
                self.theta_sim_half, self.plateau_change
            );
        }
        s += if self.pass() { "PASS\n" } else { "FAIL\n" };
        s
    }
}

impl Experiment {
    /// Compares the simulated, flow and predicted phases at the protocol
    /// period and checks the simulation against itself at half the period.
    pub fn validate(&self, agreement: f64) -> Result<ValidationReport, SimError> {
        let period = self.period(self.protocol.duration);
        let sim = self.run_cycle_pair(period)?.theta;
        let half = self.run_cycle_pair(period / 2.0)?.theta;
        let flow = self.flow_phase(period)?;
        let pred = self.predicted_phase()?;
        let pair = |a, b, x: f64, y: f64| {
            let e = rel(x, y);
            PairCheck { a, b, rel_err: e, pass: e <= agreement }
        };
        let plateau_change = rel(sim, half);
        Ok(ValidationReport {
            period,
            theta_sim: sim,
            theta_sim_half: half,
            theta_flow: flow,
            theta_pred: pred,
            plateau_change,
            plateau_ok: plateau_change <= PLATEAU_TOL,
            pairs: vec![
                pair("sim", "flow", sim, flow),
                pair("sim", "pred", sim, pred),
                pair("flow", "pred", flow, pred),
            ],
        })
    }
}

/// Largest `|ÿ_R + ω²y_R − Σ εᵢfᵢ(y_R, ẏ_R)|` of the renormalized solution
/// over `[t_lo, t_hi]`, parameters frozen at their model values and `A(t)`
/// following the flow from `A = r0/2` just before `t_lo`. Derivatives use 5-point stencils.
pub fn renormalized_residual(
    model: &ModelSpec,
    r0: f64,
    t_lo: f64,
    t_hi: f64,
    samples: usize,
) -> Result<f64, SimError> {
    let derivation = derive(model)?;
    let sys = polar_form(&derivation.flow)?;
    let sol = render_solution(&derivation);
    let schedule = Schedule::constant(model)?;
    let omega = schedule.omega(0.0);
    let h = 1e-2 / omega;
    let flow = flow_integrate(&sys, &schedule, (t_lo - 3.0 * h, t_hi + 3.0 * h), [r0, 0.0], 1e-13)?;
    let vals = schedule.values_at(0.0);
    let params = |n: &str| vals.get(n).copied();
    let no_rates = |_: &str| Some(0.0);
    let y = |t: f64| -> f64 {
        let [r, th] = flow.eval(t).expect("inside the flow span");
        let a = Complex64::from_polar(r / 2.0, th);
        sol.eval(a, omega, omega * t, &params, &no_rates)
    };
    let osc = Oscillator::new(model, schedule.clone())?;
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let t = t_lo + (t_hi - t_lo) * k as f64 / (samples.max(2) - 1) as f64;
        let f = [y(t - 2.0 * h), y(t - h), y(t), y(t + h), y(t + 2.0 * h)];
        let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
        let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
        let [_, acc] = osc.rhs(t, &[f[2], d1]);
        worst = worst.max((d2 - acc).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> ModelSpec {
        ModelSpec::parse("omega = 1.5\nparam eps = 0\n").unwrap()
    }

    #[test]
    fn harmonic_energy_is_conserved() {
        let m = harmonic();
        let s = Schedule::constant(&m).unwrap();
        let traj = integrate(&m, &s, (0.0, 1e4 / 1.5), 1e-13, [1.0, 0.0]).unwrap();
        let osc = Oscillator::new(&m, s).unwrap();
        let e0 = osc.energy(0.0, &[1.0, 0.0]);
        let e1 = osc.energy(0.0, &traj.last().unwrap());
        assert!(((e1 - e0) / e0).abs() < 1e-10, "{e0} {e1}");
    }

    #[test]
    fn crossings_of_harmonic_motion() {
        let m = harmonic();
        let s = Schedule::constant(&m).unwrap();
        let traj = integrate(&m, &s, (0.0, 30.0), 1e-11, [-1.0, 0.0]).unwrap();
        let c = traj.upward_crossings(0);
        for (k, t) in c.iter().enumerate() {
            let want = (PI / 2.0 + TAU * k as f64) / 1.5;
            assert!((t - want).abs() < 1e-10 / 1.5, "{t} {want}");
        }
    }

    #[test]
    fn polar_initial_matches_cosine() {
        let [r, th] = polar_initial([1.0, -2.0], 2.0);
        assert!((r * th.cos() - 1.0).abs() < 1e-15);
        assert!((-2.0 * r * th.sin() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn csv_row_has_all_columns() {
        let m = PhaseMeasurement { period: 1e5, omega0: 2.0, crossing_index: 7, t_plus: 1.0, t_minus: 1.5, theta: 0.5 };
        let row = csv_row(&m, 0.25);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("1.0000000000000000e5,2.0000000000000000e5,7,"));
        assert!(row.ends_with(",1.0000000000000000e0"));
    }
}

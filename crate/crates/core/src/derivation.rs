//! Order-by-order perturbation theory for `ÿ + ω²y = Σᵢ εᵢ fᵢ(y, ẏ)` and
//! extraction of the amplitude flow from the prime-frequency secular terms.

use num::complex::Complex64;

use crate::flow::{AmplitudeFlow, FlowKey};
use crate::model::{ModelError, ModelSpec, Nonlinearity};
use crate::monomial::{Monomial, Rate, OMEGA};
use crate::oscillator::solve_oscillator;
use crate::rational::RationalComplex;
use crate::series::{push_with_conj, EvalPoint, FourierSecularSeries, TermKey};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DerivationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("regular prime-frequency term at order {order}: the solution is not in canonical form")]
    RegularPrimeTerm { order: String },
    #[error("the iterated omega_dot phase term is only available for the Van der Pol drive mu*(1 - y^2)*ydot")]
    NotVanDerPol,
    #[error("flow entry {entry} has a monomial A^{p} conj(A)^{q}; the phase would not decouple")]
    NotCovariant { entry: String, p: u32, q: u32 },
}

/// Everything derived from a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    /// Adiabatic perturbative solution `y(t, t₁)` over the order lattice.
    pub solution: FourierSecularSeries,
    /// First-order nonadiabatic solution (`ε̇ᵢ` and `ω̇` terms, `ε⁰` only).
    pub rate_solution: FourierSecularSeries,
    pub flow: AmplitudeFlow,
}

/// Runs the whole derivation: expansion, flow extraction and the
/// nonadiabatic entries.
pub fn derive(model: &ModelSpec) -> Result<Derivation, DerivationError> {
    let solution = expand(model)?;
    let rate_solution = expand_rates(model)?;
    let flow = extract_flow(&solution)?;
    let flow = nonadiabatic_eps(&flow, model);
    let flow = nonadiabatic_omega(&flow, model)?;
    Ok(Derivation { solution, rate_solution, flow })
}

/// `Σ c·y^a·ẏ^b` for one parameter's part of the nonlinearity, keeping only
/// the terms of parameter order exactly `target`.
fn drive_at(
    part: &[((u32, u32), RationalComplex)],
    y: &FourierSecularSeries,
    ydot: &FourierSecularSeries,
    target: &Monomial,
) -> FourierSecularSeries {
    let keep = |k: &TermKey| k.eps.divides(target) && k.eps_dot.is_one();
    let mut out = FourierSecularSeries::new();
    for ((a, b), c) in part {
        let mut prod = FourierSecularSeries::monomial(RationalComplex::one(), TermKey::amplitude(0, 0, 0));
        for _ in 0..*a {
            prod = prod.mul_filtered(y, keep);
        }
        for _ in 0..*b {
            prod = prod.mul_filtered(ydot, keep);
        }
        out = out.add(&prod.filter(|k| &k.eps == target).scale(c));
    }
    out
}

fn parts(nl: &Nonlinearity) -> Vec<(String, Vec<((u32, u32), RationalComplex)>)> {
    let mut names: Vec<String> = nl.terms.keys().map(|(e, _, _)| e.clone()).collect();
    names.dedup();
    names
        .into_iter()
        .map(|n| {
            let p = nl.part(&n).into_iter().map(|(ab, c)| (ab, RationalComplex::real(c))).collect();
            (n, p)
        })
        .collect()
}

/// Perturbative solution to every order in the model's lattice, starting from
/// `y₀ = Ae^{iωt} + c.c.`. Prime-frequency homogeneous constants are fixed so
/// that secular terms vanish at `t = t₁`.
pub fn expand(model: &ModelSpec) -> Result<FourierSecularSeries, DerivationError> {
    model.validate()?;
    let mut orders = model.orders.clone();
    orders.sort_by(|a, b| a.degree().cmp(&b.degree()).then(a.cmp(b)));
    let parts = parts(&model.nonlinearity);

    let mut y = FourierSecularSeries::bare_amplitude();
    for order in &orders {
        let ydot = y.ddt();
        let mut rhs = FourierSecularSeries::new();
        for (name, part) in &parts {
            let eps = Monomial::var(name);
            let Some(lower) = order.div(&eps) else { continue };
            rhs = rhs.add(&drive_at(part, &y, &ydot, &lower).times_eps(&eps));
        }
        y = y.add(&solve_oscillator(&rhs));
    }
    Ok(y)
}

/// First-order nonadiabatic solution at `ε⁰`: the drive
/// `(t−t₁)·ε̇ᵢ·fᵢ(y₀, ẏ₀)` for each time-dependent parameter, and
/// `−iω̇Ae^{iωt} + c.c.` when ω is time dependent.
pub fn expand_rates(model: &ModelSpec) -> Result<FourierSecularSeries, DerivationError> {
    model.validate()?;
    let mut out = FourierSecularSeries::new();
    if model.nonadiabatic_order == 0 {
        return Ok(out);
    }
    let y0 = FourierSecularSeries::bare_amplitude();
    let y0dot = y0.ddt();
    let tau = FourierSecularSeries::monomial(RationalComplex::one(), TermKey::amplitude(0, 0, 0).with_t_pow(1));
    for (name, part) in parts(&model.nonlinearity) {
        if !model.param(&name).is_some_and(|p| p.time_dependent) {
            continue;
        }
        let drive = drive_at(&part, &y0, &y0dot, &Monomial::one());
        let rhs = drive.mul(&tau).times_eps_dot(&Monomial::var(&name));
        out = out.add(&solve_oscillator(&rhs));
    }
    if model.omega.time_dependent {
        let mut rhs = FourierSecularSeries::new();
        push_with_conj(
            &mut rhs,
            RationalComplex::imag_ratio(-1, 1),
            TermKey::amplitude(1, 1, 0).with_eps_dot(Monomial::var(OMEGA)),
        );
        out = out.add(&solve_oscillator(&rhs));
    }
    Ok(out)
}

fn rate_of(eps_dot: &Monomial) -> Option<Rate> {
    let (name, _) = eps_dot.iter().next()?;
    Some(if name == OMEGA { Rate::Omega } else { Rate::Param(name.to_string()) })
}

fn is_bare(k: &TermKey) -> bool {
    k.eps.is_one() && k.eps_dot.is_one() && k.harmonic == 1 && k.t_pow == 0 && k.p == 1 && k.q == 0 && k.omega_pow == 0
}

/// Reads `Fₙ` off the linear-in-`(t−t₁)` terms at `e^{iωt}`. Higher powers of
/// `(t−t₁)` are implied by lower orders and ignored.
pub fn extract_flow(solution: &FourierSecularSeries) -> Result<AmplitudeFlow, DerivationError> {
    let mut flow = AmplitudeFlow::new();
    for (k, c) in solution.iter() {
        if k.harmonic != 1 {
            continue;
        }
        if k.t_pow == 0 && !is_bare(k) {
            let mut order = k.eps.to_string();
            if let Some(r) = rate_of(&k.eps_dot) {
                order = format!("{order}*{r}");
            }
            return Err(DerivationError::RegularPrimeTerm { order });
        }
        if k.t_pow != 1 {
            continue;
        }
        let key = FlowKey { eps: k.eps.clone(), rate: rate_of(&k.eps_dot) };
        flow.add(key, k.p, k.q, k.omega_pow, c.clone());
    }
    Ok(flow)
}

/// Adds `ε̇ᵢ ↦ (i/2ω)·F₁⁽ⁱ⁾` for every time-dependent parameter.
pub fn nonadiabatic_eps(flow: &AmplitudeFlow, model: &ModelSpec) -> AmplitudeFlow {
    let mut out = flow.clone();
    if model.nonadiabatic_order == 0 {
        return out;
    }
    let half_i = RationalComplex::imag_ratio(1, 2);
    for p in model.time_dependent_params() {
        let Some(first) = flow.entry(&FlowKey::adiabatic(Monomial::var(&p.name))) else { continue };
        let key = FlowKey::with_rate(Monomial::one(), Rate::Param(p.name.clone()));
        for ((a, b, w), c) in first {
            out.add(key.clone(), *a, *b, w - 1, &half_i * c);
        }
    }
    out
}

/// Adds `ω̇ ↦ −A/2ω` for a time-dependent frequency and, when requested for
/// the Van der Pol drive, the iterated `μω̇` term `−(i/4ω²)A|A|²`.
pub fn nonadiabatic_omega(flow: &AmplitudeFlow, model: &ModelSpec) -> Result<AmplitudeFlow, DerivationError> {
    let mut out = flow.clone();
    let vdp_param = if model.vdp_omega_iteration {
        if !model.nonlinearity.is_van_der_pol() {
            return Err(DerivationError::NotVanDerPol);
        }
        model.nonlinearity.terms.keys().next().map(|(e, _, _)| e.clone())
    } else {
        None
    };
    if !model.omega.time_dependent || model.nonadiabatic_order == 0 {
        return Ok(out);
    }
    out.add(FlowKey::with_rate(Monomial::one(), Rate::Omega), 1, 0, -1, RationalComplex::ratio(-1, 2));
    if let Some(mu) = vdp_param {
        out.add(FlowKey::with_rate(Monomial::var(&mu), Rate::Omega), 2, 1, -2, RationalComplex::imag_ratio(-1, 4));
    }
    Ok(out)
}

/// Flow as a harmonic-free series usable as a multiplier (`ε̇` tags become
/// `eps_dot` exponents, `ω̇` uses the name `omega`).
fn flow_series(flow: &AmplitudeFlow, conjugate: bool) -> FourierSecularSeries {
    let mut s = FourierSecularSeries::new();
    for (k, poly) in &flow.entries {
        let eps_dot = match &k.rate {
            Some(r) => Monomial::var(r.param_name()),
            None => Monomial::one(),
        };
        for ((p, q, w), c) in poly {
            let (p, q, c) = if conjugate { (*q, *p, c.conj()) } else { (*p, *q, c.clone()) };
            let key =
                TermKey::amplitude(0, p, q).with_eps(k.eps.clone()).with_eps_dot(eps_dot.clone()).with_omega_pow(*w);
            s.add_term(c, key);
        }
    }
    s
}

/// `d/dt₁` of the solution at `t₁ → t` with `Ȧ` given by the adiabatic flow,
/// truncated to the lattice. It vanishes at every harmonic when the flow is
/// consistent with the solution.
pub fn t1_consistency_residual(
    solution: &FourierSecularSeries,
    flow: &AmplitudeFlow,
    model: &ModelSpec,
) -> FourierSecularSeries {
    let adiabatic = AmplitudeFlow {
        entries: flow.entries.iter().filter(|(k, _)| k.rate.is_none()).map(|(k, v)| (k.clone(), v.clone())).collect(),
    };
    let a_dot = flow_series(&adiabatic, false);
    let a_dot_conj = flow_series(&adiabatic, true);
    let keep = |k: &TermKey| model.in_lattice(&k.eps) && k.eps_dot.is_one();
    let at_t1 = solution.filter(|k| k.t_pow == 0);
    let linear = solution.filter(|k| k.t_pow == 1).lower_t_pow();
    at_t1.d_da().mul_filtered(&a_dot, keep).add(&at_t1.d_da_conj().mul_filtered(&a_dot_conj, keep)).sub(&linear)
}

/// The renormalized solution `y_R(t)`: every regular term of the
/// perturbative and nonadiabatic solutions with `A` promoted to `A(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenormalizedSolution {
    pub regular: FourierSecularSeries,
    pub flow: AmplitudeFlow,
}

pub fn render_solution(derivation: &Derivation) -> RenormalizedSolution {
    let regular = derivation.solution.add(&derivation.rate_solution).filter(|k| k.t_pow == 0);
    RenormalizedSolution { regular, flow: derivation.flow.clone() }
}

impl RenormalizedSolution {
    /// `y_R` at time `t` for amplitude `A(t)`; `phase` is `∫ω dt`.
    pub fn eval(
        &self,
        amplitude: Complex64,
        omega: f64,
        phase: f64,
        params: &dyn Fn(&str) -> Option<f64>,
        rates: &dyn Fn(&str) -> Option<f64>,
    ) -> f64 {
        let at = EvalPoint { t: 0.0, t1: 0.0, omega, amplitude, params, rates };
        self.regular.eval_with_phase(&at, phase).re
    }

    /// `Ȧ` from the flow.
    pub fn amplitude_rate(
        &self,
        amplitude: Complex64,
        omega: f64,
        params: &dyn Fn(&str) -> Option<f64>,
        rates: &dyn Fn(&str) -> Option<f64>,
    ) -> Complex64 {
        self.flow.eval(amplitude, omega, params, rates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::printer::render_series;

    fn vdp() -> ModelSpec {
        ModelSpec::parse("omega = 2\nparam mu = 0.1\nnonlinearity = mu*(1 - y^2)*ydot\nmax_order = 2\n").unwrap()
    }

    #[test]
    fn zero_nonlinearity_leaves_bare_solution() {
        let m = ModelSpec::parse("param eps\n").unwrap();
        assert_eq!(expand(&m).unwrap(), FourierSecularSeries::bare_amplitude());
        assert!(extract_flow(&expand(&m).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn vdp_first_order_text() {
        let m = ModelSpec::parse("param mu\nnonlinearity = mu*(1 - y^2)*ydot\n").unwrap();
        let y = expand(&m).unwrap();
        let y1 = y.filter(|k| k.eps == Monomial::var("mu") && k.harmonic > 0);
        assert_eq!(render_series(&y1), "(1/2)*mu*(t-t1)*A*(1-|A|^2)*e^{i w t}\n+ (1/8)*i*mu*w^-1*A^3*e^{3 i w t}");
    }

    #[test]
    fn solutions_are_real() {
        let y = expand(&vdp()).unwrap();
        assert!(y.is_conjugation_closed());
    }

    #[test]
    fn regular_prime_terms_are_rejected() {
        let mut y = FourierSecularSeries::bare_amplitude();
        y.add_term(RationalComplex::one(), TermKey::amplitude(1, 2, 1).with_eps(Monomial::var("mu")));
        assert!(matches!(extract_flow(&y), Err(DerivationError::RegularPrimeTerm { .. })));
    }

    #[test]
    fn vdp_iteration_requires_vdp() {
        let m = ModelSpec::parse(
            "omega = 1 [time_dependent]\nparam mu\nnonlinearity = mu*ydot - mu*y^3\nvdp_omega_iteration = true\n",
        )
        .unwrap();
        assert_eq!(derive(&m).unwrap_err(), DerivationError::NotVanDerPol);
    }

    #[test]
    fn t1_residual_vanishes_for_vdp() {
        let m = vdp();
        let y = expand(&m).unwrap();
        let flow = extract_flow(&y).unwrap();
        assert!(t1_consistency_residual(&y, &flow, &m).is_empty());
    }

    #[test]
    fn t1_residual_detects_a_wrong_flow() {
        let m = vdp();
        let y = expand(&m).unwrap();
        let mut flow = extract_flow(&y).unwrap();
        flow.add(FlowKey::adiabatic(Monomial::var("mu")), 2, 1, 0, RationalComplex::one());
        assert!(!t1_consistency_residual(&y, &flow, &m).is_empty());
    }
}

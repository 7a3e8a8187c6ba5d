//! Limit cycles, geometric connection and curvature of a polar RG system
//! over a two-parameter plane.

use serde::{Deserialize, Serialize};

use crate::monomial::{Rate, OMEGA};
use crate::polar::{Equation, ParamValues, PolarRGSystem, Probe};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("no stable limit cycle in (0, {r_max}] at {at}")]
    NoStableCycle { r_max: f64, at: String },
    #[error("degenerate cycle at {at}: df/dr = {slope:e} vanishes")]
    DegenerateCycle { at: String, slope: f64 },
    #[error("curvature stencil point {at} is outside the cycle domain: {reason}")]
    StencilOutOfDomain { at: String, reason: String },
    #[error("no value for `{0}`")]
    MissingValue(String),
    #[error("non-finite connection at {0}")]
    NonFinite(String),
}

/// How the connection is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Every factor evaluated exactly at the true cycle radius.
    #[default]
    Full,
    /// Every factor kept at its leading nonvanishing order in the small
    /// parameters, evaluated on the lowest-order cycle. Retains exactly the
    /// contributions that dominate when some parameter ratio diverges.
    SingularOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSample {
    pub eps: [f64; 2],
    pub a: [f64; 2],
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub eps: [f64; 2],
    pub a: [f64; 2],
    #[serde(rename = "R")]
    pub r: f64,
    pub chi: f64,
    pub h: f64,
    pub richardson_err: f64,
}

/// Ellipse `ε₁ = c₁ + δ₁cos φ`, `ε₂ = c₂ + s·δ₂ sin φ` with orientation `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub orientation: f64,
}

impl Ellipse {
    pub fn point(&self, phi: f64) -> [f64; 2] {
        [self.center[0] + self.radii[0] * phi.cos(), self.center[1] + self.orientation * self.radii[1] * phi.sin()]
    }

    pub fn tangent(&self, phi: f64) -> [f64; 2] {
        [-self.radii[0] * phi.sin(), self.orientation * self.radii[1] * phi.cos()]
    }
}

pub const DEFAULT_R_MAX: f64 = 10.0;
pub const DEFAULT_H: f64 = 1e-4;

/// A polar system restricted to a parameter plane `(ε₁, ε₂)`; every other
/// parameter (and ω unless it is a loop parameter) stays at `base`.
#[derive(Clone, Debug)]
pub struct Geometry<'a> {
    pub sys: &'a PolarRGSystem,
    pub names: [String; 2],
    pub base: ParamValues,
    pub mode: Mode,
    pub r_max: f64,
}

fn rate_for(name: &str) -> Rate {
    if name == OMEGA {
        Rate::Omega
    } else {
        Rate::Param(name.to_string())
    }
}

/// Stable root of `g` in `(0, r_max]`: the smallest sign change from positive
/// to negative, refined by bisection to `rtol`.
fn stable_root(g: impl Fn(f64) -> f64, r_max: f64, rtol: f64) -> Option<f64> {
    const N: usize = 4000;
    let lo0 = r_max * 1e-6;
    let mut prev_r = lo0;
    let mut prev = g(prev_r);
    for i in 1..=N {
        let r = lo0 + (r_max - lo0) * i as f64 / N as f64;
        let v = g(r);
        if prev > 0.0 && v <= 0.0 {
            if v == 0.0 {
                return Some(r);
            }
            let (mut a, mut b) = (prev_r, r);
            while (b - a) > rtol * b {
                let m = 0.5 * (a + b);
                if g(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev_r = r;
        prev = v;
    }
    None
}

/// Newton steps from a bracketed root, kept only while they reduce `|g|`.
fn polish(mut r: f64, g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..3 {
        let (v, d) = (g(r), dg(r));
        if v == 0.0 || d == 0.0 {
            break;
        }
        let next = r - v / d;
        if g(next).abs() >= v.abs() {
            break;
        }
        r = next;
    }
    r
}

impl<'a> Geometry<'a> {
    pub fn new(sys: &'a PolarRGSystem, names: [String; 2], base: ParamValues) -> Self {
        Self { sys, names, base, mode: Mode::Full, r_max: DEFAULT_R_MAX }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn values_at(&self, eps: [f64; 2]) -> Result<ParamValues, GeometryError> {
        let mut v = self.base.clone();
        v.insert(self.names[0].clone(), eps[0]);
        v.insert(self.names[1].clone(), eps[1]);
        if !v.contains_key(OMEGA) {
            return Err(GeometryError::MissingValue(OMEGA.into()));
        }
        Ok(v)
    }

    fn describe(&self, eps: [f64; 2]) -> String {
        format!("({}={}, {}={})", self.names[0], eps[0], self.names[1], eps[1])
    }

    /// Stable root of the adiabatic `f(r)` at `eps`.
    pub fn limit_cycle_radius(&self, eps: [f64; 2]) -> Result<f64, GeometryError> {
        let vals = self.values_at(eps)?;
        let f = |r: f64| self.sys.probe(Probe::value(Equation::R), r, &vals);
        let df = |r: f64| self.sys.probe(Probe::value(Equation::R).dr(1), r, &vals);
        stable_root(f, self.r_max, 1e-13)
            .map(|r| polish(r, f, df))
            .ok_or_else(|| GeometryError::NoStableCycle { r_max: self.r_max, at: self.describe(eps) })
    }

    /// Stable root of the lowest-order adiabatic group of `f`.
    fn leading_radius(&self, vals: &ParamValues, eps: [f64; 2]) -> Result<(f64, u32), GeometryError> {
        let groups = self.sys.groups(Probe::value(Equation::R), 1.0, vals);
        let lowest = groups
            .keys()
            .next()
            .copied()
            .ok_or_else(|| GeometryError::NoStableCycle { r_max: self.r_max, at: self.describe(eps) })?;
        let f0 =
            |r: f64| self.sys.groups(Probe::value(Equation::R), r, vals).get(&lowest).map(|g| g.value).unwrap_or(0.0);
        let df0 = |r: f64| {
            self.sys.groups(Probe::value(Equation::R).dr(1), r, vals).get(&lowest).map(|g| g.value).unwrap_or(0.0)
        };
        let r = stable_root(f0, self.r_max, 1e-13)
            .map(|r| polish(r, f0, df0))
            .ok_or_else(|| GeometryError::NoStableCycle { r_max: self.r_max, at: self.describe(eps) })?;
        Ok((r, lowest))
    }

    /// Connection one-form at `eps`.
    pub fn connection(&self, eps: [f64; 2]) -> Result<ConnectionSample, GeometryError> {
        let vals = self.values_at(eps)?;
        let sample = match self.mode {
            Mode::Full => self.connection_full(eps, &vals)?,
            Mode::SingularOnly => self.connection_singular(eps, &vals)?,
        };
        if !(sample.a[0].is_finite() && sample.a[1].is_finite()) {
            return Err(GeometryError::NonFinite(self.describe(eps)));
        }
        Ok(sample)
    }

    fn check_slope(&self, slope: f64, scale: f64, eps: [f64; 2]) -> Result<(), GeometryError> {
        if !(slope.abs() > 1e-12 * scale) || slope >= 0.0 {
            return Err(GeometryError::DegenerateCycle { at: self.describe(eps), slope });
        }
        Ok(())
    }

    fn connection_full(&self, eps: [f64; 2], vals: &ParamValues) -> Result<ConnectionSample, GeometryError> {
        let sys = self.sys;
        let r = self.limit_cycle_radius(eps)?;
        let fr_groups = sys.groups(Probe::value(Equation::R).dr(1), r, vals);
        let fr: f64 = fr_groups.values().map(|g| g.value).sum();
        let scale: f64 = fr_groups.values().map(|g| g.scale).sum();
        self.check_slope(fr, scale, eps)?;
        let omega_r = sys.probe(Probe::value(Equation::Theta).dr(1), r, vals);
        let mut a = [0.0; 2];
        for (i, name) in self.names.iter().enumerate() {
            let rate = rate_for(name);
            let d_r = -sys.probe(Probe::value(Equation::R).dparam(Some(name)), r, vals) / fr;
            let f_rate = sys.probe(Probe::value(Equation::R).rate(Some(&rate)), r, vals);
            let w_rate = sys.probe(Probe::value(Equation::Theta).rate(Some(&rate)), r, vals);
            a[i] = (d_r - f_rate) / fr * omega_r + w_rate;
        }
        Ok(ConnectionSample { eps, a, r })
    }

    fn connection_singular(&self, eps: [f64; 2], vals: &ParamValues) -> Result<ConnectionSample, GeometryError> {
        let sys = self.sys;
        let (r0, lowest) = self.leading_radius(vals, eps)?;
        // f = f₀ + g with f₀ the lowest group; R ≈ R₀ − g(R₀)/f₀'(R₀).
        let split = |probe: Probe<'_>, r: f64| {
            let groups = sys.groups(probe, r, vals);
            let lead = groups.get(&lowest).map(|g| g.value).unwrap_or(0.0);
            let rest: f64 = groups.iter().filter(|(d, _)| **d != lowest).map(|(_, g)| g.value).sum();
            (lead, rest)
        };
        let p = Probe::value(Equation::R);
        let (f0r, gr) = split(p.dr(1), r0);
        let (f0rr, _) = split(p.dr(2), r0);
        let (_, g) = split(p, r0);
        let scale: f64 = sys.groups(p.dr(1), r0, vals).get(&lowest).map(|g| g.scale).unwrap_or(0.0);
        self.check_slope(f0r, scale, eps)?;

        let fr = sys.leading(p.dr(1), r0, vals);
        let omega_r = sys.leading(Probe::value(Equation::Theta).dr(1), r0, vals);
        let mut a = [0.0; 2];
        for (i, name) in self.names.iter().enumerate() {
            let rate = rate_for(name);
            let (f0_i, g_i) = split(p.dparam(Some(name)), r0);
            let (f0r_i, _) = split(p.dr(1).dparam(Some(name)), r0);
            let d_r0 = -f0_i / f0r;
            let d_r1 = -(g_i + gr * d_r0) / f0r + g * (f0r_i + f0rr * d_r0) / (f0r * f0r);
            let d_r = d_r0 + d_r1;
            let f_rate = sys.leading(p.rate(Some(&rate)), r0, vals);
            let w_rate = sys.leading(Probe::value(Equation::Theta).rate(Some(&rate)), r0, vals);
            a[i] = (d_r - f_rate) / fr * omega_r + w_rate;
        }
        Ok(ConnectionSample { eps, a, r: r0 - g / f0r })
    }

    fn steps(&self, eps: [f64; 2], h: f64) -> [f64; 2] {
        [0, 1].map(|i| if eps[i] != 0.0 { h * eps[i].abs() } else { h })
    }

    fn chi_with(&self, eps: [f64; 2], h: f64) -> Result<f64, GeometryError> {
        let [h1, h2] = self.steps(eps, h);
        let at = |p: [f64; 2]| {
            self.connection(p)
                .map_err(|e| GeometryError::StencilOutOfDomain { at: self.describe(p), reason: e.to_string() })
        };
        let a2p = at([eps[0] + h1, eps[1]])?.a[1];
        let a2m = at([eps[0] - h1, eps[1]])?.a[1];
        let a1p = at([eps[0], eps[1] + h2])?.a[0];
        let a1m = at([eps[0], eps[1] - h2])?.a[0];
        Ok((a2p - a2m) / (2.0 * h1) - (a1p - a1m) / (2.0 * h2))
    }

    /// `χ = ∂₁a₂ − ∂₂a₁` by central differences with steps `h·|εᵢ|`, and the
    /// change when `h` is halved.
    pub fn curvature(&self, eps: [f64; 2], h: f64) -> Result<CurvatureSample, GeometryError> {
        let c = self.connection(eps)?;
        let chi = self.chi_with(eps, h)?;
        let chi_half = self.chi_with(eps, h / 2.0)?;
        Ok(CurvatureSample { eps, a: c.a, r: c.r, chi, h, richardson_err: (chi - chi_half).abs() })
    }

    /// Small-loop estimate `s·π·δ₁·δ₂·χ(center)`.
    pub fn predicted_loop_phase(&self, loop_: &Ellipse) -> Result<f64, GeometryError> {
        let chi = self.chi_with(loop_.center, DEFAULT_H)?;
        Ok(loop_.orientation.signum() * std::f64::consts::PI * loop_.radii[0] * loop_.radii[1] * chi)
    }

    /// `∮ a·dε` around the ellipse, by trapezoid rule with node doubling
    /// (spectrally accurate for the periodic integrand).
    pub fn loop_integral(&self, loop_: &Ellipse) -> Result<f64, GeometryError> {
        let integrand = |phi: f64| -> Result<f64, GeometryError> {
            let p = loop_.point(phi);
            let d = loop_.tangent(phi);
            let a = self.connection(p)?.a;
            Ok(a[0] * d[0] + a[1] * d[1])
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut n = 8usize;
        let mut sum = 0.0;
        for k in 0..n {
            sum += integrand(two_pi * k as f64 / n as f64)?;
        }
        let mut est = sum * two_pi / n as f64;
        while n < 1 << 14 {
            for k in 0..n {
                sum += integrand(two_pi * (k as f64 + 0.5) / n as f64)?;
            }
            n *= 2;
            let next = sum * two_pi / n as f64;
            let done = (next - est).abs() <= 1e-13 * next.abs().max(1e-300);
            est = next;
            if done {
                break;
            }
        }
        Ok(est)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::polar::polar_form;

    fn vdp_geometry(sys: &PolarRGSystem) -> Geometry<'_> {
        Geometry::new(sys, ["mu".into(), OMEGA.into()], ParamValues::new())
    }

    #[test]
    fn vdp_radius_and_connection() {
        let sys = polar_form(&golden::vdp().flow).unwrap();
        let g = vdp_geometry(&sys);
        let r = g.limit_cycle_radius([0.1, 2.0]).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let c = g.connection([0.1, 2.0]).unwrap();
        assert!(c.a[0].abs() < 1e-15);
        assert!((c.a[1] - 0.1 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn decaying_oscillator_has_no_cycle() {
        let flow = crate::flow::AmplitudeFlow {
            entries: [(
                crate::flow::FlowKey::adiabatic(crate::monomial::Monomial::var("mu")),
                [((1, 0, 0), crate::rational::RationalComplex::from_int(-1))].into(),
            )]
            .into(),
        };
        let sys = polar_form(&flow).unwrap();
        let g = vdp_geometry(&sys);
        assert!(matches!(g.limit_cycle_radius([0.1, 2.0]), Err(GeometryError::NoStableCycle { .. })));
    }

    #[test]
    fn vdpd_singular_connection() {
        let sys = polar_form(&golden::vdpd().flow).unwrap();
        let base: ParamValues = [(OMEGA.to_string(), 1.0)].into();
        let g = Geometry::new(&sys, ["mu".into(), "beta".into()], base).with_mode(Mode::SingularOnly);
        let c = g.connection([0.01, 0.005]).unwrap();
        assert!(c.a[0].abs() < 1e-12, "{:?}", c);
        assert!((c.a[1] + 1.5 * 0.005 / 0.01).abs() < 1e-12, "{:?}", c);
    }
}

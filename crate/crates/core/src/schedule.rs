//! Time dependence of ω and the small parameters.

use std::f64::consts::{PI, TAU};

use crate::model::ModelSpec;
use crate::monomial::OMEGA;
use crate::polar::ParamValues;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    Constant(f64),
    /// `base + δ(cos(2π(t−t0)/T) − 1)` on `[t0, t0+T]`, `base` outside.
    CosLoop {
        base: f64,
        delta: f64,
        t0: f64,
        period: f64,
    },
    /// `base + δ sin(2π(t−t0)/T)` on `[t0, t0+T]`; the sign of `δ` sets the
    /// orientation.
    SinLoop {
        base: f64,
        delta: f64,
        t0: f64,
        period: f64,
    },
    /// `from → to` along `(1 − cos)/2` on `[t0, t0+duration]`.
    Ramp {
        from: f64,
        to: f64,
        t0: f64,
        duration: f64,
    },
}

impl Path {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Path::Constant(v) => v,
            Path::CosLoop { base, delta, t0, period } => match phase(t, t0, period) {
                Some(s) => base + delta * ((TAU * s).cos() - 1.0),
                None => base,
            },
            Path::SinLoop { base, delta, t0, period } => match phase(t, t0, period) {
                Some(s) => base + delta * (TAU * s).sin(),
                None => base,
            },
            Path::Ramp { from, to, t0, duration } => {
                if t <= t0 {
                    from
                } else if t >= t0 + duration {
                    to
                } else {
                    from + (to - from) * 0.5 * (1.0 - (PI * (t - t0) / duration).cos())
                }
            }
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Path::Constant(_) => 0.0,
            Path::CosLoop { delta, t0, period, .. } => match phase(t, t0, period) {
                Some(s) => -delta * TAU / period * (TAU * s).sin(),
                None => 0.0,
            },
            Path::SinLoop { delta, t0, period, .. } => match phase(t, t0, period) {
                Some(s) => delta * TAU / period * (TAU * s).cos(),
                None => 0.0,
            },
            Path::Ramp { from, to, t0, duration } => {
                if t <= t0 || t >= t0 + duration {
                    0.0
                } else {
                    (to - from) * 0.5 * PI / duration * (PI * (t - t0) / duration).sin()
                }
            }
        }
    }

    /// Value before any motion starts.
    pub fn initial(&self) -> f64 {
        self.value(f64::NEG_INFINITY)
    }
}

fn phase(t: f64, t0: f64, period: f64) -> Option<f64> {
    let s = (t - t0) / period;
    (0.0..=1.0).contains(&s).then_some(s)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("`{0}` has no value in the model")]
    MissingValue(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
}

/// One path per model quantity, ω first.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub names: Vec<String>,
    pub paths: Vec<Path>,
}

impl Schedule {
    /// Everything frozen at the model's values.
    pub fn constant(model: &ModelSpec) -> Result<Self, ScheduleError> {
        Self::constant_with(model, |_| None)
    }

    /// Like [`Schedule::constant`], with `fill` taking precedence over the
    /// model values.
    pub fn constant_with(model: &ModelSpec, fill: impl Fn(&str) -> Option<f64>) -> Result<Self, ScheduleError> {
        let mut names = vec![OMEGA.to_string()];
        names.extend(model.params.iter().map(|p| p.name.clone()));
        let paths = names
            .iter()
            .map(|n| {
                fill(n)
                    .or_else(|| model.value(n))
                    .map(Path::Constant)
                    .ok_or_else(|| ScheduleError::MissingValue(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { names, paths })
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn set(&mut self, name: &str, path: Path) -> Result<(), ScheduleError> {
        let i = self.index(name).ok_or_else(|| ScheduleError::UnknownParam(name.into()))?;
        self.paths[i] = path;
        Ok(())
    }

    pub fn path(&self, name: &str) -> Option<&Path> {
        self.index(name).map(|i| &self.paths[i])
    }

    /// Elliptic loop starting and ending at `start`: the first parameter
    /// follows the cosine leg, the second the sine leg with sign
    /// `orientation`.
    pub fn with_loop(
        mut self,
        names: [&str; 2],
        start: [f64; 2],
        radii: [f64; 2],
        t0: f64,
        period: f64,
        orientation: f64,
    ) -> Result<Self, ScheduleError> {
        self.set(names[0], Path::CosLoop { base: start[0], delta: radii[0], t0, period })?;
        self.set(names[1], Path::SinLoop { base: start[1], delta: orientation * radii[1], t0, period })?;
        Ok(self)
    }

    pub fn values_at(&self, t: f64) -> ParamValues {
        self.names.iter().cloned().zip(self.paths.iter().map(|p| p.value(t))).collect()
    }

    pub fn rates_at(&self, t: f64) -> ParamValues {
        self.names.iter().cloned().zip(self.paths.iter().map(|p| p.rate(t))).collect()
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.paths[0].value(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_is_closed_and_continuous() {
        let c = Path::CosLoop { base: 0.1, delta: 0.01, t0: 10.0, period: 100.0 };
        let s = Path::SinLoop { base: 2.0, delta: -0.2, t0: 10.0, period: 100.0 };
        for p in [c, s] {
            assert!((p.value(10.0) - p.initial()).abs() < 1e-15);
            assert!((p.value(110.0) - p.initial()).abs() < 1e-12);
        }
        assert!((c.value(60.0) - 0.08).abs() < 1e-15);
        assert!((s.value(35.0) - 1.8).abs() < 1e-12);
    }

    #[test]
    fn rates_match_finite_differences() {
        let paths = [
            Path::CosLoop { base: 0.1, delta: 0.01, t0: 10.0, period: 100.0 },
            Path::SinLoop { base: 2.0, delta: 0.2, t0: 10.0, period: 100.0 },
            Path::Ramp { from: 2.0, to: 3.0, t0: 0.0, duration: 50.0 },
        ];
        for p in paths {
            for t in [12.3, 40.0, 77.7] {
                let h = 1e-5;
                let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
                assert!((fd - p.rate(t)).abs() < 1e-9, "{p:?} at {t}");
            }
        }
    }
}

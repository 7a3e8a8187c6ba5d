//! Dormand–Prince 8(5,3) with step-size control and a 7th-order continuous
//! extension.

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size {h:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step limit {0} reached")]
    TooManySteps(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, h_max: f64::INFINITY, max_steps: 100_000_000 }
    }

    pub fn with_h_max(mut self, h: f64) -> Self {
        self.h_max = h;
        self
    }
}

#[rustfmt::skip]
mod tableau {
    pub const C: [f64; 16] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0, 1.0, 0.1, 0.2, 0.7777777777777778];
    pub const A: [[f64; 16]; 16] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259, 0.0, 0.0, 0.0, 0.0],
        [0.056167502283047954, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25350021021662483, -0.2462390374708025, -0.12419142326381637, 0.15329179827876568, 0.00820105229563469, 0.007567897660545699, -0.008298, 0.0, 0.0, 0.0],
        [0.03183464816350214, 0.0, 0.0, 0.0, 0.0, 0.028300909672366776, 0.053541988307438566, -0.05492374857139099, 0.0, 0.0, -0.00010834732869724932, 0.0003825710908356584, -0.00034046500868740456, 0.1413124436746325, 0.0, 0.0],
        [-0.42889630158379194, 0.0, 0.0, 0.0, 0.0, -4.697621415361164, 7.683421196062599, 4.06898981839711, 0.3567271874552811, 0.0, 0.0, 0.0, -0.0013990241651590145, 2.9475147891527724, -9.15095847217987, 0.0],
    ];
    pub const B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
    pub const E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
    pub const E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];
    pub const D: [[f64; 16]; 4] = [
        [-8.428938276109013, 0.0, 0.0, 0.0, 0.0, 0.5667149535193777, -3.0689499459498917, 2.38466765651207, 2.117034582445028, -0.871391583777973, 2.2404374302607883, 0.6315787787694688, -0.08899033645133331, 18.148505520854727, -9.194632392478356, -4.436036387594894],
        [10.427508642579134, 0.0, 0.0, 0.0, 0.0, 242.28349177525817, 165.20045171727028, -374.5467547226902, -22.113666853125306, 7.733432668472264, -30.674084731089398, -9.332130526430229, 15.697238121770845, -31.139403219565178, -9.35292435884448, 35.81684148639408],
        [19.985053242002433, 0.0, 0.0, 0.0, 0.0, -387.0373087493518, -189.17813819516758, 527.8081592054236, -11.57390253995963, 6.8812326946963, -1.0006050966910838, 0.7777137798053443, -2.778205752353508, -60.19669523126412, 84.32040550667716, 11.99229113618279],
        [-25.69393346270375, 0.0, 0.0, 0.0, 0.0, -154.18974869023643, -231.5293791760455, 357.6391179106141, 93.40532418362432, -37.45832313645163, 104.0996495089623, 29.8402934266605, -43.53345659001114, 96.32455395918828, -39.17726167561544, -149.72683625798564],
    ];
}
use tableau::*;

const STAGES: usize = 12;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// One accepted step with its continuous extension.
#[derive(Clone, Copy, Debug)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    f: [[f64; N]; 7],
}

impl<const N: usize> Step<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Interpolant and its time derivative at `t ∈ [t0, t1]`.
    pub fn eval_with_derivative(&self, t: f64) -> ([f64; N], [f64; N]) {
        let h = self.h();
        let x = (t - self.t0) / h;
        let mut y = [0.0; N];
        let mut dy = [0.0; N];
        for (k, f) in self.f.iter().rev().enumerate() {
            let (g, dg) = if k % 2 == 0 { (x, 1.0) } else { (1.0 - x, -1.0) };
            for i in 0..N {
                let s = y[i] + f[i];
                dy[i] = dy[i] * g + s * dg;
                y[i] = s * g;
            }
        }
        (std::array::from_fn(|i| self.y0[i] + y[i]), std::array::from_fn(|i| dy[i] / h))
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        self.eval_with_derivative(t).0
    }

    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        self.eval_with_derivative(t).1
    }

    /// Upward zero crossings of component `i` inside `(t0, t1]`: sign changes
    /// over `samples` sub-intervals, bisected on the interpolant and polished
    /// by Newton steps.
    pub fn upward_crossings(&self, i: usize, samples: usize) -> Vec<f64> {
        let mut out = Vec::new();
        let samples = samples.max(1);
        let h = self.h();
        let mut ta = self.t0;
        let mut va = self.y0[i];
        for k in 1..=samples {
            let tb = if k == samples { self.t1 } else { self.t0 + h * k as f64 / samples as f64 };
            let vb = if k == samples { self.y1[i] } else { self.eval(tb)[i] };
            if va < 0.0 && vb >= 0.0 {
                out.push(self.refine_root(i, ta, tb));
            }
            ta = tb;
            va = vb;
        }
        out
    }

    fn refine_root(&self, i: usize, mut a: f64, mut b: f64) -> f64 {
        while b - a > 1e-6 * self.h().abs() {
            let m = 0.5 * (a + b);
            if self.eval(m)[i] < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let mut t = 0.5 * (a + b);
        for _ in 0..5 {
            let (y, dy) = self.eval_with_derivative(t);
            if dy[i] == 0.0 {
                break;
            }
            let next = t - y[i] / dy[i];
            if !(a..=b).contains(&next) || next == t {
                break;
            }
            t = next;
        }
        t
    }
}

/// Adaptive integrator state for `y' = f(t, y)`.
pub struct Dop853<F, const N: usize> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    t_old: f64,
    y_old: [f64; N],
    k: [[f64; N]; 16],
    h_abs: f64,
    /// `k[STAGES]` holds the derivative at `t` and must move to `k[0]`.
    fsal: bool,
    opts: Options,
    pub steps: usize,
    pub rejected: usize,
}

fn rms<const N: usize>(v: impl Fn(usize) -> f64) -> f64 {
    ((0..N).map(|i| v(i).powi(2)).sum::<f64>() / N as f64).sqrt()
}

impl<F, const N: usize> Dop853<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], opts: Options) -> Self {
        let mut k = [[0.0; N]; 16];
        k[0] = f(t0, &y0);
        let mut s =
            Self { f, t: t0, y: y0, t_old: t0, y_old: y0, k, h_abs: 0.0, fsal: false, opts, steps: 0, rejected: 0 };
        s.h_abs = s.initial_step();
        s
    }

    fn initial_step(&mut self) -> f64 {
        let o = self.opts;
        let (y, f0) = (self.y, self.k[0]);
        let sc: [f64; N] = std::array::from_fn(|i| o.atol + o.rtol * y[i].abs());
        let d0 = rms::<N>(|i| y[i] / sc[i]);
        let d1 = rms::<N>(|i| f0[i] / sc[i]);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(o.h_max);
        let y1: [f64; N] = std::array::from_fn(|i| y[i] + h0 * f0[i]);
        let f1 = (self.f)(self.t + h0, &y1);
        let d2 = rms::<N>(|i| (f1[i] - f0[i]) / sc[i]) / h0;
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(1.0 / 8.0) };
        (100.0 * h0).min(h1).min(o.h_max)
    }

    /// Advances by one accepted step, never past `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<(), OdeError> {
        let o = self.opts;
        if self.steps >= o.max_steps {
            return Err(OdeError::TooManySteps(o.max_steps));
        }
        if self.fsal {
            self.k[0] = self.k[STAGES];
            self.fsal = false;
        }
        let (t, y) = (self.t, self.y);
        let mut h_abs = self.h_abs.min(o.h_max);
        let mut rejected = false;
        loop {
            let min_step = 1e3 * f64::EPSILON * t.abs().max(1.0);
            if h_abs < min_step {
                return Err(OdeError::StepUnderflow { t, h: h_abs });
            }
            let t_new = (t + h_abs).min(t_end);
            let h = t_new - t;
            for s in 1..STAGES {
                let ys: [f64; N] =
                    std::array::from_fn(|i| y[i] + h * (0..s).map(|j| A[s][j] * self.k[j][i]).sum::<f64>());
                self.k[s] = (self.f)(t + C[s] * h, &ys);
            }
            let y_new: [f64; N] =
                std::array::from_fn(|i| y[i] + h * (0..STAGES).map(|j| B[j] * self.k[j][i]).sum::<f64>());
            self.k[STAGES] = (self.f)(t_new, &y_new);
            let sc: [f64; N] = std::array::from_fn(|i| o.atol + o.rtol * y[i].abs().max(y_new[i].abs()));
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for i in 0..N {
                let a5: f64 = (0..=STAGES).map(|j| E5[j] * self.k[j][i]).sum::<f64>() / sc[i];
                let a3: f64 = (0..=STAGES).map(|j| E3[j] * self.k[j][i]).sum::<f64>() / sc[i];
                e5 += a5 * a5;
                e3 += a3 * a3;
            }
            let err = if e5 == 0.0 && e3 == 0.0 { 0.0 } else { h * e5 / ((e5 + 0.01 * e3) * N as f64).sqrt() };
            if err < 1.0 {
                let mut factor =
                    if err == 0.0 { MAX_FACTOR } else { MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT)) };
                if rejected {
                    factor = factor.min(1.0);
                }
                self.h_abs = h_abs * factor;
                self.t_old = t;
                self.y_old = y;
                self.t = t_new;
                self.y = y_new;
                self.steps += 1;
                self.fsal = true;
                return Ok(());
            }
            self.rejected += 1;
            rejected = true;
            let factor = if err.is_finite() { MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT)) } else { MIN_FACTOR };
            h_abs *= factor;
        }
    }

    /// Start of the last accepted step.
    pub fn previous(&self) -> (f64, [f64; N]) {
        (self.t_old, self.y_old)
    }

    /// Continuous extension of the last accepted step.
    pub fn dense(&mut self) -> Step<N> {
        let (t0, y0, y1) = (self.t_old, self.y_old, self.y);
        let h = self.t - t0;
        for s in STAGES + 1..16 {
            let ys: [f64; N] = std::array::from_fn(|i| y0[i] + h * (0..s).map(|j| A[s][j] * self.k[j][i]).sum::<f64>());
            self.k[s] = (self.f)(t0 + C[s] * h, &ys);
        }
        let k = &self.k;
        let mut f = [[0.0; N]; 7];
        for i in 0..N {
            let dy = y1[i] - y0[i];
            f[0][i] = dy;
            f[1][i] = h * k[0][i] - dy;
            f[2][i] = 2.0 * dy - h * (k[STAGES][i] + k[0][i]);
            for r in 0..4 {
                f[3 + r][i] = h * (0..16).map(|j| D[r][j] * k[j][i]).sum::<f64>();
            }
        }
        Step { t0, t1: self.t, y0, y1, f }
    }

    /// Integrates to `t_end`, handing every step to `observe`; stops early
    /// when `observe` returns `false`.
    pub fn run(&mut self, t_end: f64, mut observe: impl FnMut(&Step<N>) -> bool) -> Result<(), OdeError> {
        while self.t < t_end {
            self.step(t_end)?;
            let s = self.dense();
            if !observe(&s) {
                break;
            }
        }
        Ok(())
    }

    /// Integrates to `t_end` without dense output.
    pub fn advance(&mut self, t_end: f64) -> Result<(), OdeError> {
        while self.t < t_end {
            self.step(t_end)?;
        }
        Ok(())
    }
}

/// Integrates and returns the final state.
pub fn solve<const N: usize>(
    f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: Options,
) -> Result<[f64; N], OdeError> {
    let mut ode = Dop853::new(f, t0, y0, opts);
    ode.advance(t_end)?;
    Ok(ode.y)
}

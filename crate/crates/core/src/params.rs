//! Model parameters and the initial concentration profile.

use crate::error::{check_positive, Error, Result};

/// Initial concentration `u_init` on the physical interval `[0, L0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `c1 * exp(c2 * x) + c3`.
    Exponential { c1: f64, c2: f64, c3: f64 },
    /// Piecewise-linear interpolation through `(x, u)` samples with strictly
    /// increasing `x` covering `[0, L0]`. Constant extrapolation outside.
    Tabulated { x: Vec<f64>, u: Vec<f64> },
}

impl InitialProfile {
    pub fn constant(c: f64) -> Self {
        InitialProfile::Exponential {
            c1: 0.0,
            c2: 0.0,
            c3: c,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialProfile::Exponential { c1, c2, c3 } => c1 * (c2 * x).exp() + c3,
            InitialProfile::Tabulated { x: xs, u } => {
                if x <= xs[0] {
                    return u[0];
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return u[last];
                }
                let k = xs.partition_point(|&s| s <= x) - 1;
                let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
                u[k] + w * (u[k + 1] - u[k])
            }
        }
    }

    /// Exact integral over `[lo, hi]` when a closed form exists.
    pub(crate) fn exact_integral(&self, lo: f64, hi: f64) -> Option<f64> {
        match *self {
            InitialProfile::Exponential { c1, c2, c3 } => {
                let width = hi - lo;
                let exp_part = if c2 == 0.0 {
                    c1 * width
                } else {
                    c1 * (c2 * lo).exp() * (c2 * width).exp_m1() / c2
                };
                Some(exp_part + c3 * width)
            }
            InitialProfile::Tabulated { .. } => None,
        }
    }

    /// Essential infimum and supremum on `[0, len]`.
    pub fn range(&self, len: f64) -> (f64, f64) {
        match self {
            InitialProfile::Exponential { .. } => {
                // Monotone family: extremes sit at the endpoints.
                let (u0, u1) = (self.eval(0.0), self.eval(len));
                (u0.min(u1), u0.max(u1))
            }
            InitialProfile::Tabulated { x, .. } => {
                let mut lo = self.eval(0.0).min(self.eval(len));
                let mut hi = self.eval(0.0).max(self.eval(len));
                for &xk in x.iter().filter(|&&xk| xk > 0.0 && xk < len) {
                    let v = self.eval(xk);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            }
        }
    }

    pub fn validate(&self, len: f64) -> Result<()> {
        match self {
            InitialProfile::Exponential { c1, c2, c3 } => {
                for (name, v) in [("u_init.c1", c1), ("u_init.c2", c2), ("u_init.c3", c3)] {
                    if !v.is_finite() {
                        return Err(Error::NonFinite { name, value: *v });
                    }
                }
            }
            InitialProfile::Tabulated { x, u } => {
                if x.len() != u.len() {
                    return Err(Error::InvalidProfile(format!(
                        "{} abscissae for {} values",
                        x.len(),
                        u.len()
                    )));
                }
                if x.len() < 2 {
                    return Err(Error::InvalidProfile("need at least two samples".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidProfile(
                        "sample abscissae must be strictly increasing".into(),
                    ));
                }
                if x.iter().chain(u.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidProfile("non-finite sample".into()));
                }
            }
        }
        let (lo, _) = self.range(len);
        if lo < 0.0 {
            let x = match self {
                InitialProfile::Exponential { .. } => {
                    if self.eval(0.0) < self.eval(len) {
                        0.0
                    } else {
                        len
                    }
                }
                InitialProfile::Tabulated { x, u } => x
                    .iter()
                    .zip(u)
                    .find(|(_, &v)| v == lo)
                    .map(|(&x, _)| x)
                    .unwrap_or(0.0),
            };
            return Err(Error::NegativeInitialData { x, value: lo });
        }
        Ok(())
    }
}

/// Kinetic constants, Pilling-Bedworth ratio, initial width and profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Incoming flux rate at the solution/oxide interface.
    pub a: f64,
    /// Linear outflow coefficient at the solution/oxide interface.
    pub b: f64,
    /// Dissolution velocity constant at `X0`.
    pub alpha0: f64,
    pub beta0: f64,
    /// Growth velocity constants at `X1`.
    pub alpha1: f64,
    pub beta1: f64,
    /// Pilling-Bedworth ratio.
    pub r: f64,
    /// Initial oxide width.
    pub l0: f64,
    pub u_init: InitialProfile,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("a", self.a)?;
        check_positive("b", self.b)?;
        check_positive("alpha0", self.alpha0)?;
        check_positive("beta0", self.beta0)?;
        check_positive("alpha1", self.alpha1)?;
        check_positive("beta1", self.beta1)?;
        check_positive("R", self.r)?;
        check_positive("L0", self.l0)?;
        self.u_init.validate(self.l0)
    }

    /// `a / b`, the equilibrium trace at `X0` for the exchange flux.
    pub fn ratio_ab(&self) -> f64 {
        self.a / self.b
    }

    /// `alpha0 / beta0`, the trace at `X0` with zero dissolution velocity.
    pub fn ratio0(&self) -> f64 {
        self.alpha0 / self.beta0
    }

    /// `alpha1 / beta1`, the trace at `X1` with zero growth velocity.
    pub fn ratio1(&self) -> f64 {
        self.alpha1 / self.beta1
    }

    /// `(alpha0 + R alpha1) / (beta0 + R beta1)`.
    pub fn ratio_mixed(&self) -> f64 {
        (self.alpha0 + self.r * self.alpha1) / (self.beta0 + self.r * self.beta1)
    }

    /// Wave speed candidate `(alpha0 - beta0 a / b) / R`, defined whether or
    /// not a travelling wave exists.
    pub fn wave_speed_candidate(&self) -> f64 {
        (self.alpha0 - self.beta0 * self.ratio_ab()) / self.r
    }

    /// Parameter set with the reference initial profile `(a/b) exp(-R c x) + 2`.
    fn with_reference_profile(
        a: f64,
        b: f64,
        alpha0: f64,
        beta0: f64,
        alpha1: f64,
        beta1: f64,
        r: f64,
    ) -> Self {
        let mut p = ModelParams {
            a,
            b,
            alpha0,
            beta0,
            alpha1,
            beta1,
            r,
            l0: 1.0,
            u_init: InitialProfile::constant(0.0),
        };
        p.u_init = InitialProfile::Exponential {
            c1: p.ratio_ab(),
            c2: -p.r * p.wave_speed_candidate(),
            c3: 2.0,
        };
        p
    }

    /// Travelling-wave regime: the layer converges to a rigidly moving profile.
    pub fn testcase1() -> Self {
        Self::with_reference_profile(1.0, 1.0, 1.5, 1.0, 0.5, 4.0, 2.0)
    }

    /// Dissolution-dominated: the layer vanishes in finite time.
    pub fn testcase2() -> Self {
        Self::with_reference_profile(1.75, 1.0, 5.0, 2.0, 5.0, 2.0, 2.0)
    }

    /// Growth-dominated: the layer thickens indefinitely.
    pub fn testcase3() -> Self {
        Self::with_reference_profile(1.0, 1.0, 4.0, 1.0, 3.0, 1.5, 2.0)
    }
}

/// Named parameter presets with their reference horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    TestCase1,
    TestCase2,
    TestCase3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::TestCase1, Preset::TestCase2, Preset::TestCase3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TestCase1 => "testcase1",
            Preset::TestCase2 => "testcase2",
            Preset::TestCase3 => "testcase3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn params(self) -> ModelParams {
        match self {
            Preset::TestCase1 => ModelParams::testcase1(),
            Preset::TestCase2 => ModelParams::testcase2(),
            Preset::TestCase3 => ModelParams::testcase3(),
        }
    }

    /// Final time used for the reference experiments.
    pub fn horizon(self) -> f64 {
        match self {
            Preset::TestCase1 => 20.0,
            Preset::TestCase2 => 3.5,
            Preset::TestCase3 => 10.0,
        }
    }
}

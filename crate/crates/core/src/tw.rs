//! Travelling-wave classification and closed-form profiles.
//!
//! A travelling wave translates rigidly at speed `c` with constant width `L`
//! and profile `u(y) = (a/b) exp(-R c y)` on `[0, L]`. It exists (and is
//! unique) iff `a/b` lies strictly between `alpha0/beta0` and
//! `(alpha0 + R alpha1)/(beta0 + R beta1)`. When
//! `a/b = alpha0/beta0 = alpha1/beta1` every constant state `a/b` of any
//! width is stationary.

use crate::error::Result;
use crate::mesh::Mesh;
use crate::params::ModelParams;

/// Relative tolerance used for the equality and strict-inequality tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravellingWave {
    /// Speed of both interfaces.
    pub c_hat: f64,
    /// Width of the layer.
    pub l_hat: f64,
    /// Trace at the solution side, `a / b`.
    pub level: f64,
    /// Pilling-Bedworth ratio, which sets the profile decay rate `R c`.
    pub r: f64,
}

impl TravellingWave {
    /// Constant stationary state of the equilibrium continuum.
    pub fn stationary(level: f64, width: f64, r: f64) -> Self {
        Self {
            c_hat: 0.0,
            l_hat: width,
            level,
            r,
        }
    }

    /// Profile in physical coordinates `y in [0, L]`.
    pub fn profile(&self, y: f64) -> f64 {
        self.level * (-self.r * self.c_hat * y).exp()
    }

    /// Profile rescaled to the reference interval: `u(L xi)`.
    pub fn rescaled(&self, xi: f64) -> f64 {
        self.profile(self.l_hat * xi)
    }

    /// Interface positions at time `t` for a wave started at `X0 = 0`.
    pub fn interfaces(&self, t: f64) -> (f64, f64) {
        (self.c_hat * t, self.l_hat + self.c_hat * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeClassification {
    UniqueWave(TravellingWave),
    /// Any constant state at this level is stationary, whatever the width.
    EquilibriumContinuum(f64),
    NoWave,
}

impl RegimeClassification {
    pub fn wave(&self) -> Option<&TravellingWave> {
        match self {
            RegimeClassification::UniqueWave(w) => Some(w),
            _ => None,
        }
    }
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

/// `x < y` with a relative margin.
fn clearly_less(x: f64, y: f64, tol: f64) -> bool {
    y - x > tol * x.abs().max(y.abs())
}

/// Sorts the parameter set into one of the three regimes.
pub fn classify(params: &ModelParams, tol: f64) -> Result<RegimeClassification> {
    params.validate()?;
    let ab = params.ratio_ab();
    let r0 = params.ratio0();
    let r1 = params.ratio1();
    let mixed = params.ratio_mixed();

    if close(ab, r0, tol) && close(r0, r1, tol) {
        return Ok(RegimeClassification::EquilibriumContinuum(ab));
    }
    let forward = clearly_less(mixed, ab, tol) && clearly_less(ab, r0, tol);
    let reversed = clearly_less(ab, mixed, tol) && clearly_less(r0, ab, tol);
    if !(forward || reversed) {
        return Ok(RegimeClassification::NoWave);
    }

    let c_hat = params.wave_speed_candidate();
    let arg = (params.alpha1 + c_hat) / (params.beta1 * ab);
    let l_hat = -arg.ln() / (params.r * c_hat);
    if !(l_hat.is_finite() && l_hat > 0.0) {
        // Only reachable when the margins above are within rounding.
        return Ok(RegimeClassification::NoWave);
    }
    Ok(RegimeClassification::UniqueWave(TravellingWave {
        c_hat,
        l_hat,
        level: ab,
        r: params.r,
    }))
}

/// Wave profile at the reference centers, `u(L xi_i)` for `i = 0..=I+1`.
pub fn wave_profile_on_mesh(wave: &TravellingWave, mesh: &Mesh) -> Vec<f64> {
    mesh.centers().iter().map(|&xi| wave.rescaled(xi)).collect()
}

use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::scheme::{interface_rates, velocities};
use crate::state::{State, Trajectory};
use crate::tw::{classify, DEFAULT_TOLERANCE};

/// Invariant concentration bracket `(m, M)`.
///
/// Invariant as long as `a/b`, `alpha0/beta0` and `alpha1/beta1` all lie in
/// `[m, M]`, which the travelling-wave condition guarantees.
pub fn linf_bounds(params: &ModelParams) -> (f64, f64) {
    let (lo, hi) = params.u_init.range(params.l0);
    (lo.min(params.ratio1()), hi.max(params.ratio0()))
}

/// Range of the width rate `delta L` for traces in `[m, M]`.
pub fn width_rate_bounds(params: &ModelParams, m: f64, big_m: f64) -> (f64, f64) {
    let base = -params.alpha0 - params.r * params.alpha1;
    let slope = params.beta0 + params.r * params.beta1;
    (base + m * slope, base + big_m * slope)
}

/// Range of the `X1` rate for traces in `[m, M]`.
pub fn x1_rate_bounds(params: &ModelParams, m: f64, big_m: f64) -> (f64, f64) {
    (-params.alpha1 + params.beta1 * m, -params.alpha1 + params.beta1 * big_m)
}

/// Bracket `(v_flat, v_sharp)` of every edge velocity.
pub fn velocity_bounds(params: &ModelParams, m: f64, big_m: f64) -> (f64, f64) {
    let (dl_min, dl_max) = width_rate_bounds(params, m, big_m);
    (
        params.beta0 * m - params.alpha0 - dl_max.max(0.0),
        params.beta0 * big_m - params.alpha0 - dl_min.min(0.0),
    )
}

/// Horizon below which the width is guaranteed to stay positive, when
/// the width can shrink at all.
pub fn guaranteed_horizon(params: &ModelParams) -> Option<f64> {
    let (m, _) = linf_bounds(params);
    let shrink = (params.alpha0 + params.r * params.alpha1) - m * (params.beta0 + params.r * params.beta1);
    (shrink > 0.0).then(|| params.l0 / shrink)
}

/// `L^n sum h_i u_i^n - L^{n-1} sum h_i u_i^{n-1} - dt (a - b u_0^n)`.
pub fn mass_balance_defect(prev: &State, next: &State, mesh: &Mesh, dt: f64, params: &ModelParams) -> f64 {
    next.mass(mesh) - prev.mass(mesh) - dt * (params.a - params.b * next.u[0])
}

/// Largest violation of each a-priori bound along a trajectory.
///
/// Each field is `max(0, worst excess)`; a field of zero means the bound
/// held everywhere. Step-wise quantities need a dense trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundReport {
    pub max_principle: f64,
    pub mass_balance: f64,
    /// Zero when no travelling wave exists.
    pub width: f64,
    pub velocity: f64,
    pub x1_rate: f64,
    pub width_rate: f64,
    pub steps_checked: usize,
}

impl BoundReport {
    pub fn worst(&self) -> f64 {
        [
            self.max_principle,
            self.mass_balance,
            self.width,
            self.velocity,
            self.x1_rate,
            self.width_rate,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

fn excess(x: f64, lo: f64, hi: f64) -> f64 {
    (lo - x).max(x - hi).max(0.0)
}

pub fn verify_bounds(traj: &Trajectory, mesh: &Mesh, params: &ModelParams) -> BoundReport {
    let (m, big_m) = linf_bounds(params);
    let (v_lo, v_hi) = velocity_bounds(params, m, big_m);
    let (x1_lo, x1_hi) = x1_rate_bounds(params, m, big_m);
    let (l_lo, l_hi) = width_rate_bounds(params, m, big_m);
    let wave = classify(params, DEFAULT_TOLERANCE)
        .ok()
        .and_then(|c| c.wave().copied());
    let dt = traj.time_grid.dt();

    let mut rep = BoundReport::default();
    for s in &traj.states {
        for &u in &s.u {
            rep.max_principle = rep.max_principle.max(excess(u, m, big_m));
        }
    }
    for (_, prev, next) in traj.pairs() {
        rep.steps_checked += 1;
        rep.mass_balance = rep
            .mass_balance
            .max(mass_balance_defect(prev, next, mesh, dt, params).abs());
        if let Some(w) = wave {
            let floor = (m / big_m * prev.width).min(w.l_hat);
            rep.width = rep.width.max(floor - next.width).max(0.0);
        }
        let (_, dx1, dl) = interface_rates(prev, next, dt);
        rep.x1_rate = rep.x1_rate.max(excess(dx1, x1_lo, x1_hi));
        rep.width_rate = rep.width_rate.max(excess(dl, l_lo, l_hi));
        for &v in &velocities(prev, next, mesh, dt, params.r).values {
            rep.velocity = rep.velocity.max(excess(v, v_lo, v_hi));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::InitialProfile;

    #[test]
    fn testcase1_bracket() {
        assert_eq!(linf_bounds(&ModelParams::testcase1()), (0.125, 3.0));
    }

    #[test]
    fn constant_data_brackets() {
        let mut p = ModelParams::testcase1();
        p.u_init = InitialProfile::constant(5.0);
        p.alpha1 = 1.0;
        p.beta1 = 1.0;
        p.alpha0 = 2.0;
        p.beta0 = 1.0;
        assert_eq!(linf_bounds(&p), (1.0, 5.0));

        p.u_init = InitialProfile::constant(2.0);
        p.alpha1 = 2.0;
        assert_eq!(linf_bounds(&p), (2.0, 2.0));
    }

    #[test]
    fn degenerate_velocity_bracket() {
        let p = ModelParams::testcase1();
        let c = 1.0;
        let (v_lo, v_hi) = velocity_bounds(&p, c, c);
        let (dl, dl2) = width_rate_bounds(&p, c, c);
        assert_eq!(dl, dl2);
        assert!(v_lo <= v_hi);
        assert_eq!(v_lo, p.beta0 * c - p.alpha0 - dl.max(0.0));
        assert_eq!(v_hi, p.beta0 * c - p.alpha0 - dl.min(0.0));
    }

    #[test]
    fn horizon_only_when_shrinking() {
        assert!(guaranteed_horizon(&ModelParams::testcase2()).is_some());
        let mut p = ModelParams::testcase1();
        p.u_init = InitialProfile::constant(10.0);
        p.alpha0 = 0.01;
        p.alpha1 = 1.0;
        assert!(guaranteed_horizon(&p).is_none());
    }
}

//! Post-processing: distances to the travelling wave, discrete norms, a-priori
//! bound checks and the grid refinement study.

mod bounds;
mod convergence;
mod norms;

pub use bounds::{
    guaranteed_horizon, linf_bounds, mass_balance_defect, velocity_bounds, verify_bounds, width_rate_bounds,
    x1_rate_bounds, BoundReport,
};
pub use convergence::{
    convergence_study, project_reference, ConvergenceConfig, ConvergenceLevel, ConvergenceReport, ProjectedField,
};
pub use norms::{h1_norm, l2_norm, l2h1_norm, DiscreteNorms};

use crate::mesh::Mesh;
use crate::state::{State, Trajectory};
use crate::tw::TravellingWave;

/// `L sum_i h_i (u_i - u_tw(xi_i))^2` with the wave profile rescaled onto
/// its own width.
pub fn tw_distance(state: &State, mesh: &Mesh, wave: &TravellingWave) -> f64 {
    state.width
        * mesh
            .sizes()
            .iter()
            .zip(&mesh.centers()[1..=mesh.cells()])
            .zip(&state.u[1..=mesh.cells()])
            .map(|((h, &xi), u)| h * (u - wave.rescaled(xi)).powi(2))
            .sum::<f64>()
}

/// `(t_n, d^n)` for every stored level.
pub fn distance_series(traj: &Trajectory, mesh: &Mesh, wave: &TravellingWave) -> Vec<(f64, f64)> {
    traj.states
        .iter()
        .enumerate()
        .map(|(k, s)| (traj.time_of(k), tw_distance(s, mesh, wave)))
        .collect()
}

/// Least-squares slope of `ln d` against `t` over `t in [t_lo, t_hi]`.
///
/// `None` with fewer than two usable points; nonpositive distances are
/// skipped.
pub fn log_linear_slope(series: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, d)| *t >= t_lo && *t <= t_hi && *d > 0.0)
        .map(|&(t, d)| (t, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - tm).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use crate::tw::{classify, wave_profile_on_mesh, DEFAULT_TOLERANCE};

    fn wave() -> TravellingWave {
        *classify(&ModelParams::testcase1(), DEFAULT_TOLERANCE)
            .unwrap()
            .wave()
            .unwrap()
    }

    #[test]
    fn distance_of_sampled_wave_is_zero() {
        let w = wave();
        let mesh = Mesh::uniform(50).unwrap();
        let s = State::new(wave_profile_on_mesh(&w, &mesh), 1.0, 1.0 + w.l_hat);
        assert_eq!(tw_distance(&s, &mesh, &w), 0.0);
    }

    #[test]
    fn constant_offset() {
        let w = wave();
        let mesh = Mesh::uniform(50).unwrap();
        for (eps, width) in [(2.0, 1.0), (0.3, w.l_hat), (-1.0, 2.5)] {
            let u = wave_profile_on_mesh(&w, &mesh).iter().map(|v| v + eps).collect();
            let s = State::new(u, 0.0, width);
            let d = tw_distance(&s, &mesh, &w);
            assert!((d - width * eps * eps).abs() < 1e-12 * d, "{d}");
        }
    }

    #[test]
    fn slope_of_exact_exponential() {
        let series: Vec<_> = (0..100).map(|k| (0.2 * k as f64, 3.0 * (-0.7 * 0.2 * k as f64).exp())).collect();
        let s = log_linear_slope(&series, 5.0, 15.0).unwrap();
        assert!((s + 0.7).abs() < 1e-12);
        assert!(log_linear_slope(&series, 100.0, 200.0).is_none());
    }
}

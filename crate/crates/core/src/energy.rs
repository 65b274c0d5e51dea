//! Discrete free energies and their dissipation.
//!
//! For any convex density `phi` the scheme dissipates the total free energy
//!
//! ```text
//! H_tot^n = H^n - pi(alpha0/beta0) S0^n - phi'(a/b) Sab^n - R pi(alpha1/beta1) S1^n
//! ```
//!
//! where `H^n = L^n sum_i h_i phi(u_i^n)`, `pi(r) = r phi'(r) - phi(r)` and
//! `S0`, `Sab`, `S1` accumulate `dt (alpha0 - beta0 u_0^k)`,
//! `dt (a - b u_0^k)` and `dt (alpha1 - beta1 u_{I+1}^k)` over the steps.
//! Each step satisfies
//! `(H_tot^n - H_tot^{n-1}) / dt + D_bulk^n + D_bound^n <= 0` with both
//! dissipation terms nonnegative.

use crate::bernoulli::bernoulli;
use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::scheme::velocities;
use crate::state::{State, Trajectory};

/// A convex energy density with its derivative and pressure.
pub trait ConvexDensity {
    fn phi(&self, r: f64) -> f64;
    fn phi_prime(&self, r: f64) -> f64;

    /// `pi(r) = r phi'(r) - phi(r)`.
    fn pressure(&self, r: f64) -> f64 {
        r * self.phi_prime(r) - self.phi(r)
    }
}

/// Built-in densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `r^2 / 2`.
    Quadratic,
    /// `r^4`.
    Quartic,
    /// `(r - c)_+^3`, a C2 one-sided penalty above `c`.
    Excess { threshold: f64 },
    /// `r ln r - r + 1`, for positive states only.
    Entropy,
    /// `(lo - r)_+^3 + (r - hi)_+^3`, zero on `[lo, hi]`.
    Bracket { lo: f64, hi: f64 },
}

impl Density {
    pub fn name(&self) -> &'static str {
        match self {
            Density::Quadratic => "quadratic",
            Density::Quartic => "quartic",
            Density::Excess { .. } => "excess",
            Density::Entropy => "entropy",
            Density::Bracket { .. } => "bracket",
        }
    }

    /// The four densities used for the dissipation checks; the excess
    /// threshold sits at `alpha0 / beta0`.
    pub fn family(params: &ModelParams) -> Vec<Density> {
        vec![
            Density::Quadratic,
            Density::Quartic,
            Density::Excess {
                threshold: params.ratio0(),
            },
            Density::Entropy,
        ]
    }
}

impl ConvexDensity for Density {
    fn phi(&self, r: f64) -> f64 {
        match *self {
            Density::Quadratic => 0.5 * r * r,
            Density::Quartic => r.powi(4),
            Density::Excess { threshold } => (r - threshold).max(0.0).powi(3),
            Density::Entropy => {
                if r == 0.0 {
                    1.0
                } else {
                    r * r.ln() - r + 1.0
                }
            }
            Density::Bracket { lo, hi } => (lo - r).max(0.0).powi(3) + (r - hi).max(0.0).powi(3),
        }
    }

    fn phi_prime(&self, r: f64) -> f64 {
        match *self {
            Density::Quadratic => r,
            Density::Quartic => 4.0 * r.powi(3),
            Density::Excess { threshold } => 3.0 * (r - threshold).max(0.0).powi(2),
            Density::Entropy => r.ln(),
            Density::Bracket { lo, hi } => {
                -3.0 * (lo - r).max(0.0).powi(2) + 3.0 * (r - hi).max(0.0).powi(2)
            }
        }
    }

    fn pressure(&self, r: f64) -> f64 {
        match *self {
            Density::Entropy => r - 1.0,
            _ => r * self.phi_prime(r) - self.phi(r),
        }
    }
}

/// `H = L sum_{i=1}^{I} h_i phi(u_i)`; the traces do not contribute.
pub fn free_energy(state: &State, mesh: &Mesh, phi: &impl ConvexDensity) -> f64 {
    state.width
        * mesh
            .sizes()
            .iter()
            .zip(&state.u[1..=mesh.cells()])
            .map(|(h, &u)| h * phi.phi(u))
            .sum::<f64>()
}

/// Mean-value weight `theta` in `[0, 1]` with
/// `pi(u_r) - pi(u_l) = (theta u_l + (1 - theta) u_r)(phi'(u_r) - phi'(u_l))`.
pub fn mean_value_weight(u_left: f64, u_right: f64, phi: &impl ConvexDensity) -> f64 {
    const DEGENERATE: f64 = 1e-13;
    let dphi = phi.phi_prime(u_right) - phi.phi_prime(u_left);
    let du = u_left - u_right;
    if dphi.abs() <= DEGENERATE || du.abs() <= DEGENERATE {
        return 0.5;
    }
    let dpi = phi.pressure(u_right) - phi.pressure(u_left);
    ((dpi / dphi - u_right) / du).clamp(0.0, 1.0)
}

/// Bulk (flux) and boundary (reaction) dissipation of the step `prev -> next`.
pub fn dissipation_split(
    prev: &State,
    next: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
    phi: &impl ConvexDensity,
) -> (f64, f64) {
    let cells = mesh.cells();
    let v = velocities(prev, next, mesh, dt, params.r);
    let u = &next.u;
    let mut bulk = 0.0;
    for i in 0..=cells {
        let lh = next.width * mesh.gaps()[i];
        let arg = lh * v.values[i];
        let theta = mean_value_weight(u[i], u[i + 1], phi);
        let weight = bernoulli(arg) * theta + bernoulli(-arg) * (1.0 - theta);
        let dphi = phi.phi_prime(u[i + 1]) - phi.phi_prime(u[i]);
        bulk += weight * dphi / lh * (u[i + 1] - u[i]);
    }

    let (u0, ul) = (u[0], u[cells + 1]);
    let p = params;
    let bound = (p.beta0 * u0 - p.alpha0) * (phi.pressure(u0) - phi.pressure(p.ratio0()))
        + (p.b * u0 - p.a) * (phi.phi_prime(u0) - phi.phi_prime(p.ratio_ab()))
        + p.r * (p.beta1 * ul - p.alpha1) * (phi.pressure(ul) - phi.pressure(p.ratio1()));
    (bulk, bound)
}

/// One row of the energy ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub n: usize,
    pub t: f64,
    pub free_energy: f64,
    pub total_free_energy: f64,
    /// Zero at `n = 0`.
    pub d_bulk: f64,
    pub d_bound: f64,
}

/// Running exchange sums with the outer environments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExchangeSums {
    /// `sum_k dt (alpha0 - beta0 u_0^k)`.
    pub dissolution: f64,
    /// `sum_k dt (a - b u_0^k)`.
    pub inflow: f64,
    /// `sum_k dt (alpha1 - beta1 u_{I+1}^k)`.
    pub growth: f64,
}

/// Per-step `H`, `H_tot` and dissipation for one density.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger<D> {
    pub density: D,
    pub entries: Vec<LedgerEntry>,
    pub sums: ExchangeSums,
}

impl<D: ConvexDensity> EnergyLedger<D> {
    pub fn new(density: D, initial: &State, mesh: &Mesh) -> Self {
        let h = free_energy(initial, mesh, &density);
        Self {
            density,
            entries: vec![LedgerEntry {
                n: 0,
                t: 0.0,
                free_energy: h,
                total_free_energy: h,
                d_bulk: 0.0,
                d_bound: 0.0,
            }],
            sums: ExchangeSums::default(),
        }
    }

    /// Appends level `n` reached from `prev`.
    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &mut self,
        n: usize,
        t: f64,
        prev: &State,
        next: &State,
        mesh: &Mesh,
        dt: f64,
        params: &ModelParams,
    ) {
        let (free_energy, total) = total_free_energy_increment(&mut self.sums, next, mesh, &self.density, params, dt);
        let (d_bulk, d_bound) = dissipation_split(prev, next, mesh, dt, params, &self.density);
        self.entries.push(LedgerEntry {
            n,
            t,
            free_energy,
            total_free_energy: total,
            d_bulk,
            d_bound,
        });
    }

    /// `(H_tot^n - H_tot^{n-1}) / dt + D_bulk^n + D_bound^n` for each
    /// recorded step; nonpositive up to solver tolerance.
    pub fn balance(&self, dt: f64) -> Vec<f64> {
        self.entries
            .windows(2)
            .map(|w| (w[1].total_free_energy - w[0].total_free_energy) / dt + w[1].d_bulk + w[1].d_bound)
            .collect()
    }

    /// Ledger of a dense trajectory.
    pub fn from_trajectory(density: D, traj: &Trajectory, mesh: &Mesh, params: &ModelParams) -> Self {
        let mut ledger = Self::new(density, traj.initial(), mesh);
        let dt = traj.time_grid.dt();
        for (n, prev, next) in traj.pairs() {
            ledger.record(n, traj.time_grid.time(n), prev, next, mesh, dt, params);
        }
        ledger
    }
}

/// Adds level `n`'s exchange terms to `sums` and returns `(H^n, H_tot^n)`.
pub fn total_free_energy_increment(
    sums: &mut ExchangeSums,
    state: &State,
    mesh: &Mesh,
    phi: &impl ConvexDensity,
    params: &ModelParams,
    dt: f64,
) -> (f64, f64) {
    let p = params;
    let u0 = state.u[0];
    let ul = state.u[mesh.cells() + 1];
    sums.dissolution += dt * (p.alpha0 - p.beta0 * u0);
    sums.inflow += dt * (p.a - p.b * u0);
    sums.growth += dt * (p.alpha1 - p.beta1 * ul);
    let h = free_energy(state, mesh, phi);
    let total = h
        - phi.pressure(p.ratio0()) * sums.dissolution
        - phi.phi_prime(p.ratio_ab()) * sums.inflow
        - p.r * phi.pressure(p.ratio1()) * sums.growth;
    (h, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{discretize_initial, InitialMode};

    #[test]
    fn quadratic_energy_of_constant_state() {
        let mesh = Mesh::uniform(13).unwrap();
        let s = State::new(vec![1.5; 15], 0.0, 2.0);
        assert!((free_energy(&s, &mesh, &Density::Quadratic) - 1.5 * 1.5).abs() < 1e-14);
    }

    #[test]
    fn zero_density_gives_zero() {
        let mesh = Mesh::uniform(5).unwrap();
        let s = State::new(vec![1.5; 7], 0.0, 2.0);
        let flat = Density::Bracket { lo: 0.0, hi: 10.0 };
        assert_eq!(free_energy(&s, &mesh, &flat), 0.0);
    }

    #[test]
    fn quadratic_theta_is_one_half() {
        for (a, b) in [(1.0, 2.0), (0.3, 0.1), (2.5, 2.6)] {
            let t = mean_value_weight(a, b, &Density::Quadratic);
            assert!((t - 0.5).abs() < 1e-9, "{a} {b} {t}");
        }
        assert_eq!(mean_value_weight(1.0, 3.0, &Density::Quadratic), 0.5);
    }

    #[test]
    fn theta_stays_in_unit_interval() {
        let fam = [
            Density::Quadratic,
            Density::Quartic,
            Density::Excess { threshold: 1.0 },
            Density::Entropy,
        ];
        for d in fam {
            for k in 1..40 {
                for l in 1..40 {
                    let (a, b) = (0.1 * k as f64, 0.07 * l as f64);
                    let t = mean_value_weight(a, b, &d);
                    assert!((0.0..=1.0).contains(&t));
                }
            }
        }
    }

    #[test]
    fn pressure_consistency() {
        for d in [
            Density::Quadratic,
            Density::Quartic,
            Density::Excess { threshold: 1.0 },
            Density::Entropy,
            Density::Bracket { lo: 0.5, hi: 2.0 },
        ] {
            for k in 1..50 {
                let r = 0.07 * k as f64;
                let direct = r * d.phi_prime(r) - d.phi(r);
                assert!((d.pressure(r) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn convexity_by_secant_monotonicity() {
        for d in [
            Density::Quadratic,
            Density::Quartic,
            Density::Excess { threshold: 1.0 },
            Density::Entropy,
            Density::Bracket { lo: 0.5, hi: 2.0 },
        ] {
            let mut prev = d.phi_prime(0.05);
            for k in 2..100 {
                let cur = d.phi_prime(0.05 * k as f64);
                assert!(cur >= prev, "{:?}", d);
                prev = cur;
            }
        }
    }

    #[test]
    fn equilibrium_has_no_dissipation() {
        let mut p = ModelParams::testcase1();
        p.a = 1.0;
        p.b = 1.0;
        p.alpha0 = 1.0;
        p.beta0 = 1.0;
        p.alpha1 = 1.0;
        p.beta1 = 1.0;
        let mesh = Mesh::uniform(8).unwrap();
        let s = State::new(vec![1.0; 10], 0.0, 1.0);
        for d in Density::family(&p) {
            let (bulk, bound) = dissipation_split(&s, &s, &mesh, 0.1, &p, &d);
            assert_eq!((bulk, bound), (0.0, 0.0));
        }
    }

    #[test]
    fn exchange_sums_vanish_at_equilibrium_traces() {
        let mut p = ModelParams::testcase1();
        p.a = 1.5;
        let mesh = Mesh::uniform(4).unwrap();
        let mut u = vec![1.0; 6];
        u[0] = 1.5;
        u[5] = p.ratio1();
        let s = State::new(u, 0.0, 1.0);
        let mut sums = ExchangeSums::default();
        for _ in 0..5 {
            total_free_energy_increment(&mut sums, &s, &mesh, &Density::Quadratic, &p, 0.1);
        }
        assert_eq!(sums, ExchangeSums::default());
    }

    #[test]
    fn initial_energy_matches_midpoint_quadrature() {
        let p = ModelParams::testcase1();
        let mesh = Mesh::uniform(100).unwrap();
        let s = discretize_initial(&p, &mesh, InitialMode::CellAverage).unwrap();
        let h = free_energy(&s, &mesh, &Density::Quadratic);
        // Midpoint rule on a much finer grid of the exact integrand.
        let fine = 100_000;
        let q: f64 = (0..fine)
            .map(|k| {
                let x = (k as f64 + 0.5) / fine as f64;
                0.5 * p.u_init.eval(x).powi(2)
            })
            .sum::<f64>()
            / fine as f64;
        assert!((h - q).abs() < 1e-4 * (1.0 / 100.0f64).powi(2) * 100.0, "{h} {q}");
    }
}

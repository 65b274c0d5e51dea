//! Fully implicit ALE finite-volume scheme.
//!
//! Per time step the unknowns are the concentrations `u_0..u_{I+1}` (cell
//! values plus the two interface traces), the interface positions `X0`,
//! `X1` and the width `L`. The equations are the cell balances with
//! Scharfetter-Gummel fluxes, the exchange condition at `X0`, the zero-flux
//! condition at `X1`, the two interface laws and the closure
//! `L = X1 - X0`. Each step is solved with a damped Newton method, falling
//! back to a continuation in `lambda` when Newton fails.

mod flux;
mod homotopy;
mod linalg;
mod newton;
mod run;
mod system;

pub use flux::{fluxes, interface_rates, sg_flux, velocities, FluxField, VelocityField};
pub use homotopy::homotopy_solve;
pub use linalg::BorderedMatrix;
pub use newton::{newton_step_solve, StepSolution};
pub use run::{run, run_from, RunOptions};
pub use system::HomotopySystem;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::state::State;

use system::{NonlinearSystem, SchemeSystem};

/// Newton and continuation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm tolerance on the Newton increment.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Initial number of uniform continuation steps; doubled on failure.
    pub homotopy_steps: usize,
    pub max_homotopy_steps: usize,
    /// Smallest admissible width.
    pub width_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_newton_iters: 50,
            homotopy_steps: 16,
            max_homotopy_steps: 1024,
            width_floor: 1e-8,
        }
    }
}

impl SolverOptions {
    /// Defaults with the width floor scaled to the initial width.
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            width_floor: 1e-8 * params.l0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::check_positive("newton_tol", self.newton_tol)?;
        crate::error::check_positive("width_floor", self.width_floor)?;
        if self.max_newton_iters == 0 {
            return Err(Error::NonPositive {
                name: "max_newton_iters",
                value: 0.0,
            });
        }
        if self.homotopy_steps == 0 || self.max_homotopy_steps < self.homotopy_steps {
            return Err(Error::NonPositive {
                name: "homotopy_steps",
                value: self.homotopy_steps as f64,
            });
        }
        Ok(())
    }
}

fn check_candidate(cand: &State, mesh: &Mesh, prev: &State) -> Result<()> {
    let expected = mesh.cells() + 2;
    for got in [cand.u.len(), prev.u.len()] {
        if got != expected {
            return Err(Error::Dimension { expected, got });
        }
    }
    if !(cand.width > 0.0) {
        return Err(Error::WidthCollapsed { width: cand.width });
    }
    Ok(())
}

/// Residual of the scheme at candidate `cand`, stacked as: `I` cell
/// balances, left exchange condition, right zero-flux condition, `X0` law,
/// `X1` law, width closure.
pub fn residual(
    prev: &State,
    cand: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    check_candidate(cand, mesh, prev)?;
    let sys = SchemeSystem {
        prev,
        mesh,
        dt,
        params,
    };
    let block = sys.residual(&SchemeSystem::pack(cand));
    let mut out = vec![0.0; block.len()];
    for (row, value) in block.into_iter().enumerate() {
        out[sys.published_row(row)] = value;
    }
    Ok(out)
}

/// Analytic Jacobian of [`residual`] with respect to
/// `(u_0, ..., u_{I+1}, X0, X1, L)`, rows in the same order as the residual.
pub fn jacobian(
    prev: &State,
    cand: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
) -> Result<DMatrix<f64>> {
    check_candidate(cand, mesh, prev)?;
    let sys = SchemeSystem {
        prev,
        mesh,
        dt,
        params,
    };
    let block = sys.assemble(&SchemeSystem::pack(cand)).1.to_dense();
    let mut out = DMatrix::zeros(block.nrows(), block.ncols());
    for row in 0..block.nrows() {
        out.row_mut(sys.published_row(row)).copy_from(&block.row(row));
    }
    Ok(out)
}

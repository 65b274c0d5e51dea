use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::state::State;

use super::system::{newton, SchemeSystem};
use super::SolverOptions;

/// A converged time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSolution {
    pub state: State,
    pub iterations: usize,
    pub residual_inf: f64,
    pub used_homotopy: bool,
}

/// Interface positions advanced with the interface laws evaluated at the
/// previous traces; concentrations are left untouched.
fn interface_predictor(prev: &State, dt: f64, params: &ModelParams) -> State {
    let cells = prev.cells();
    let dx1 = -params.alpha1 + params.beta1 * prev.u[cells + 1];
    let dx0 = params.alpha0 - params.beta0 * prev.u[0] + (1.0 - params.r) * dx1;
    State::new(prev.u.clone(), prev.x0 + dt * dx0, prev.x1 + dt * dx1)
}

/// One implicit step by damped Newton.
///
/// The initial iterate keeps the previous concentrations and moves the
/// interfaces with the explicit interface laws, which makes a travelling
/// wave an exact first guess. If that would put the width under the floor,
/// the previous state itself is used.
pub fn newton_step_solve(
    prev: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<StepSolution> {
    let expected = mesh.cells() + 2;
    if prev.u.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: prev.u.len(),
        });
    }
    let sys = SchemeSystem {
        prev,
        mesh,
        dt,
        params,
    };
    let predicted = interface_predictor(prev, dt, params);
    let guess = if predicted.width > opts.width_floor {
        predicted
    } else {
        prev.clone()
    };
    let report = newton(&sys, SchemeSystem::pack(&guess), opts)?;
    let state = sys.unpack(&report.x);
    if state.width <= opts.width_floor {
        return Err(Error::WidthCollapsed { width: state.width });
    }
    Ok(StepSolution {
        state,
        iterations: report.iterations,
        residual_inf: report.residual_inf,
        used_homotopy: false,
    })
}

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::state::State;

use super::newton::StepSolution;
use super::system::{inf_norm, newton, HomotopySystem};
use super::SolverOptions;

/// One implicit step by continuation from the explicit `lambda = 0`
/// solution to the scheme at `lambda = 1`.
///
/// `lambda` advances in `homotopy_steps` uniform increments with a Newton
/// correction at each value; on failure the path is restarted with twice
/// as many increments, up to `max_homotopy_steps`.
pub fn homotopy_solve(
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
    let mut steps = opts.homotopy_steps;
    let mut last_err = Error::NoConvergence {
        iterations: 0,
        increment: f64::INFINITY,
    };
    let mut saw_collapse = false;
    while steps <= opts.max_homotopy_steps {
        match follow_path(prev, mesh, dt, params, opts, steps) {
            Ok(sol) => return Ok(sol),
            Err(e) => {
                saw_collapse |= matches!(e, Error::WidthCollapsed { .. });
                last_err = e;
            }
        }
        steps *= 2;
    }
    if saw_collapse {
        Err(Error::WidthCollapsed {
            width: opts.width_floor,
        })
    } else {
        Err(last_err)
    }
}

fn follow_path(
    prev: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
    opts: &SolverOptions,
    steps: usize,
) -> Result<StepSolution> {
    let mut sys = HomotopySystem {
        prev,
        mesh,
        dt,
        params,
        lambda: 0.0,
    };
    let mut x = sys.start_point();
    let mut iterations = 0;
    for k in 1..=steps {
        sys.lambda = k as f64 / steps as f64;
        let report = newton(&sys, x, opts)?;
        iterations += report.iterations;
        x = report.x;
    }
    let state = sys.to_state(&x);
    if state.width <= opts.width_floor {
        return Err(Error::WidthCollapsed { width: state.width });
    }
    Ok(StepSolution {
        residual_inf: inf_norm(&sys.residual(&x)),
        state,
        iterations,
        used_homotopy: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::newton_step_solve;
    use crate::state::{discretize_initial, InitialMode};

    #[test]
    fn agrees_with_newton_on_first_step() {
        let p = ModelParams::testcase1();
        let mesh = Mesh::uniform(40).unwrap();
        let prev = discretize_initial(&p, &mesh, InitialMode::CellAverage).unwrap();
        let opts = SolverOptions::default();
        let a = newton_step_solve(&prev, &mesh, 1e-2, &p, &opts).unwrap();
        let b = homotopy_solve(&prev, &mesh, 1e-2, &p, &opts).unwrap();
        assert!(b.used_homotopy);
        let diff = a
            .state
            .u
            .iter()
            .zip(&b.state.u)
            .map(|(x, y)| (x - y).abs())
            .chain([
                (a.state.x0 - b.state.x0).abs(),
                (a.state.x1 - b.state.x1).abs(),
                (a.state.width - b.state.width).abs(),
            ])
            .fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }
}

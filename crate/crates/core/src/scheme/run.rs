use crate::error::{Error, Result};
use crate::mesh::{Mesh, TimeGrid};
use crate::params::ModelParams;
use crate::state::{discretize_initial, InitialMode, State, StepInfo, Termination, Trajectory};

use super::homotopy::homotopy_solve;
use super::newton::{newton_step_solve, StepSolution};
use super::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub solver: SolverOptions,
    /// Keep every `stride`-th time level (the last one is always kept).
    pub stride: usize,
}

impl RunOptions {
    pub fn for_params(params: &ModelParams) -> Self {
        Self {
            solver: SolverOptions::for_params(params),
            stride: 1,
        }
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            stride: 1,
        }
    }
}

/// Time loop from the discretized initial condition.
pub fn run(
    params: &ModelParams,
    mesh: &Mesh,
    grid: TimeGrid,
    opts: &RunOptions,
    mode: InitialMode,
) -> Result<Trajectory> {
    let initial = discretize_initial(params, mesh, mode)?;
    run_from(initial, params, mesh, grid, opts)
}

/// Solves one step, Newton first and continuation as fallback.
pub(crate) fn solve_step(
    prev: &State,
    mesh: &Mesh,
    dt: f64,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<StepSolution> {
    match newton_step_solve(prev, mesh, dt, params, opts) {
        Ok(sol) => Ok(sol),
        Err(newton_err) => match homotopy_solve(prev, mesh, dt, params, opts) {
            Ok(sol) => Ok(sol),
            Err(Error::WidthCollapsed { width }) => Err(Error::WidthCollapsed { width }),
            Err(e) => match newton_err {
                Error::WidthCollapsed { width } => Err(Error::WidthCollapsed { width }),
                _ => Err(e),
            },
        },
    }
}

/// Time loop from an arbitrary initial state.
///
/// Solver breakdowns do not produce an `Err`: the trajectory is returned up
/// to the last converged level with the reason recorded in `termination`.
pub fn run_from(
    initial: State,
    params: &ModelParams,
    mesh: &Mesh,
    grid: TimeGrid,
    opts: &RunOptions,
) -> Result<Trajectory> {
    params.validate()?;
    opts.solver.validate()?;
    if opts.stride == 0 {
        return Err(Error::NonPositive {
            name: "stride",
            value: 0.0,
        });
    }
    let expected = mesh.cells() + 2;
    if initial.u.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: initial.u.len(),
        });
    }
    initial.check(1e-12 * initial.width.abs().max(1.0))?;

    let dt = grid.dt();
    let mut states = vec![initial.clone()];
    let mut indices = vec![0];
    let mut steps = Vec::with_capacity(grid.steps());
    let mut termination = Termination::Completed;
    let mut current = initial;
    let mut current_stored = true;

    for n in 1..=grid.steps() {
        match solve_step(&current, mesh, dt, params, &opts.solver) {
            Ok(sol) => {
                steps.push(StepInfo {
                    newton_iters: sol.iterations,
                    residual_inf: sol.residual_inf,
                    used_homotopy: sol.used_homotopy,
                });
                current = sol.state;
                current_stored = n % opts.stride == 0;
                if current_stored {
                    states.push(current.clone());
                    indices.push(n);
                }
            }
            Err(Error::WidthCollapsed { .. }) => {
                termination = Termination::WidthCollapsed(n);
                break;
            }
            Err(_) => {
                termination = Termination::SolverFailed(n);
                break;
            }
        }
    }
    if !current_stored {
        indices.push(steps.len());
        states.push(current);
    }
    Ok(Trajectory {
        states,
        indices,
        steps,
        time_grid: grid,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_keeps_last_level() {
        let p = ModelParams::testcase1();
        let mesh = Mesh::uniform(10).unwrap();
        let grid = TimeGrid::new(0.01, 7).unwrap();
        let opts = RunOptions {
            stride: 3,
            ..RunOptions::for_params(&p)
        };
        let traj = run(&p, &mesh, grid, &opts, InitialMode::CellAverage).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        assert_eq!(traj.indices, vec![0, 3, 6, 7]);
        assert_eq!(traj.steps.len(), 7);
        assert!(!traj.is_dense());

        let dense = run(&p, &mesh, grid, &RunOptions::for_params(&p), InitialMode::CellAverage).unwrap();
        assert!(dense.is_dense());
        assert_eq!(dense.last(), traj.last());
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ModelParams::testcase1();
        let mesh = Mesh::uniform(4).unwrap();
        let grid = TimeGrid::new(0.01, 2).unwrap();
        let bad = State::new(vec![1.0; 3], 0.0, 1.0);
        assert!(run_from(bad, &p, &mesh, grid, &RunOptions::default()).is_err());
        let opts = RunOptions {
            stride: 0,
            ..RunOptions::default()
        };
        assert!(run(&p, &mesh, grid, &opts, InitialMode::CellAverage).is_err());
    }
}

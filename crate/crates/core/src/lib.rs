//! Implicit finite-volume scheme for a one-dimensional oxide layer with two
//! moving interfaces.
//!
//! The layer `[X0(t), X1(t)]` is mapped onto `[0, 1]`. Each time step solves
//! the implicit Euler scheme with Scharfetter-Gummel fluxes for the
//! concentrations, the two boundary traces, both interface positions and
//! the width. The scheme keeps travelling waves exact and dissipates a
//! family of free energies, which [`energy`] and [`analysis`] check post hoc.
//!
//! ```
//! use oxide_fv::{run, InitialMode, Mesh, ModelParams, RunOptions, TimeGrid};
//!
//! let params = ModelParams::testcase1();
//! let mesh = Mesh::uniform(20).unwrap();
//! let grid = TimeGrid::new(0.05, 10).unwrap();
//! let traj = run(&params, &mesh, grid, &RunOptions::for_params(&params), InitialMode::CellAverage).unwrap();
//! assert_eq!(traj.states.len(), 11);
//! ```

pub mod analysis;
pub mod bernoulli;
pub mod energy;
mod error;
pub mod mesh;
pub mod params;
pub mod scheme;
pub mod state;
pub mod tw;

pub use error::{Error, Result};
pub use mesh::{Mesh, TimeGrid};
pub use params::{InitialProfile, ModelParams, Preset};
pub use scheme::{homotopy_solve, newton_step_solve, run, run_from, RunOptions, SolverOptions};
pub use state::{discretize_initial, InitialMode, State, StepInfo, Termination, Trajectory};
pub use tw::{classify, RegimeClassification, TravellingWave};

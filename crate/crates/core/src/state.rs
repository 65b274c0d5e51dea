//! Discrete states, initial discretization, and trajectory storage.

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TimeGrid};
use crate::params::ModelParams;

/// One time level of the scheme.
///
/// `u` has length `I + 2`: `u[0]` and `u[I + 1]` are the traces at `X0` and
/// `X1`, `u[1..=I]` the cell values.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Vec<f64>,
    pub x0: f64,
    pub x1: f64,
    pub width: f64,
}

impl State {
    pub fn new(u: Vec<f64>, x0: f64, x1: f64) -> Self {
        Self {
            u,
            x0,
            x1,
            width: x1 - x0,
        }
    }

    /// `|L - (X1 - X0)|`.
    pub fn closure_defect(&self) -> f64 {
        (self.width - self.x1 + self.x0).abs()
    }

    /// Checks the width closure to `tol` and the sign constraints.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.closure_defect() > tol {
            return Err(Error::InvalidProfile(format!(
                "width {} inconsistent with interfaces [{}, {}]",
                self.width, self.x0, self.x1
            )));
        }
        if !(self.width > 0.0) {
            return Err(Error::WidthCollapsed { width: self.width });
        }
        if let Some((i, &v)) = self.u.iter().enumerate().find(|(_, &v)| !(v >= 0.0)) {
            return Err(Error::InvalidProfile(format!("u[{i}] = {v} is negative")));
        }
        Ok(())
    }

    /// Physical mass `L sum_i h_i u_i`.
    pub fn mass(&self, mesh: &Mesh) -> f64 {
        self.width * mesh.weighted_sum(&self.u)
    }

    pub fn cells(&self) -> usize {
        self.u.len() - 2
    }
}

/// How the initial profile is projected onto the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialMode {
    /// Cell averages of `u_init` (exact for the exponential family).
    #[default]
    CellAverage,
    /// Point values of `u_init` at the physical cell centers.
    CenterSample,
}

// Three-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

fn cell_average(params: &ModelParams, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if let Some(integral) = params.u_init.exact_integral(lo, hi) {
        return integral / width;
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * width;
    0.5 * GAUSS3
        .iter()
        .map(|&(node, weight)| weight * params.u_init.eval(mid + half * node))
        .sum::<f64>()
}

/// Initial state on the physical interval `[0, L0]`.
pub fn discretize_initial(params: &ModelParams, mesh: &Mesh, mode: InitialMode) -> Result<State> {
    params.validate()?;
    let l0 = params.l0;
    let cells = mesh.cells();
    let mut u = Vec::with_capacity(cells + 2);
    u.push(params.u_init.eval(0.0));
    match mode {
        InitialMode::CellAverage => {
            u.extend(
                mesh.edges()
                    .windows(2)
                    .map(|e| cell_average(params, l0 * e[0], l0 * e[1])),
            );
        }
        InitialMode::CenterSample => {
            u.extend(mesh.centers()[1..=cells].iter().map(|&xi| params.u_init.eval(l0 * xi)));
        }
    }
    u.push(params.u_init.eval(l0));
    if let Some((i, &v)) = u.iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(Error::NegativeInitialData {
            x: l0 * mesh.centers()[i],
            value: v,
        });
    }
    Ok(State {
        u,
        x0: 0.0,
        x1: l0,
        width: l0,
    })
}

/// Why a time loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// The width reached the floor while computing step `n`.
    WidthCollapsed(usize),
    /// Neither Newton nor continuation converged at step `n`.
    SolverFailed(usize),
}

/// Per-step solver statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub newton_iters: usize,
    pub residual_inf: f64,
    pub used_homotopy: bool,
}

/// Stored time levels of a run.
///
/// `states[k]` is time level `indices[k]`; with `stride == 1` every level
/// is kept and `indices[k] == k`. The final computed level is always
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub indices: Vec<usize>,
    pub steps: Vec<StepInfo>,
    pub time_grid: TimeGrid,
    pub termination: Termination,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        &self.states[0]
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Time level index of the last computed state.
    pub fn last_index(&self) -> usize {
        *self.indices.last().unwrap()
    }

    pub fn time_of(&self, k: usize) -> f64 {
        self.time_grid.time(self.indices[k])
    }

    /// Whether every time level is stored.
    pub fn is_dense(&self) -> bool {
        self.indices.iter().enumerate().all(|(k, &n)| k == n)
    }

    /// Consecutive stored pairs `(n, prev, next)` of a dense trajectory.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, &State, &State)> {
        self.states
            .windows(2)
            .zip(&self.indices[1..])
            .map(|(w, &n)| (n, &w[0], &w[1]))
    }
}

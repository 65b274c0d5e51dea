//! Nonlinear systems solved at each time step and the damped Newton driver.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::params::ModelParams;
use crate::state::State;

use super::flux::edge_flux;
use super::linalg::BorderedMatrix;
use super::SolverOptions;

/// Why a trial iterate was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Violation {
    Width,
    Negative,
}

pub(crate) trait NonlinearSystem {
    fn assemble(&self, x: &[f64]) -> (Vec<f64>, BorderedMatrix);

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.assemble(x).0
    }

    fn check(&self, x: &[f64], width_floor: f64) -> Option<Violation>;
}

/// The implicit scheme for one step, unknowns
/// `(u_0, ..., u_{I+1}, X0, X1, L)`.
///
/// Rows are kept in block order: the left exchange condition, the `I`
/// cell balances and the zero-flux condition form the tridiagonal core;
/// the two interface laws and the width closure are the border rows.
pub(crate) struct SchemeSystem<'a> {
    pub prev: &'a State,
    pub mesh: &'a Mesh,
    pub dt: f64,
    pub params: &'a ModelParams,
}

impl SchemeSystem<'_> {
    pub fn pack(state: &State) -> Vec<f64> {
        let mut x = state.u.clone();
        x.extend([state.x0, state.x1, state.width]);
        x
    }

    pub fn unpack(&self, x: &[f64]) -> State {
        let n = self.mesh.cells() + 2;
        State {
            u: x[..n].to_vec(),
            x0: x[n],
            x1: x[n + 1],
            width: x[n + 2],
        }
    }

    /// Maps a block-order row to the published ordering (cell balances,
    /// left condition, right condition, `X0` law, `X1` law, closure).
    pub fn published_row(&self, block_row: usize) -> usize {
        let cells = self.mesh.cells();
        match block_row {
            0 => cells,
            r if r <= cells => r - 1,
            r => r,
        }
    }
}

impl NonlinearSystem for SchemeSystem<'_> {
    fn assemble(&self, x: &[f64]) -> (Vec<f64>, BorderedMatrix) {
        let mesh = self.mesh;
        let p = self.params;
        let prev = self.prev;
        let dt = self.dt;
        let cells = mesh.cells();
        let n = cells + 2;
        let (cx0, cx1, cl) = (n, n + 1, n + 2);
        let (x0, x1, width) = (x[cx0], x[cx1], x[cl]);
        let u = &x[..n];

        let dx0 = (x0 - prev.x0) / dt;
        let dx1 = (x1 - prev.x1) / dt;
        let dl = (width - prev.width) / dt;

        let mut f = vec![0.0; n + 3];
        let mut jac = BorderedMatrix::zeros(n, 3);

        for e in 0..=cells {
            let xi = mesh.edges()[e];
            let gap = mesh.gaps()[e];
            let v = (1.0 - p.r) * dx1 - xi * dl - dx0;
            let ef = edge_flux(u[e], u[e + 1], v, width, gap);
            let lh = width * gap;
            let d_x0 = ef.d_arg * (-lh / dt);
            let d_x1 = ef.d_arg * ((1.0 - p.r) * lh / dt);
            let d_l = ef.d_width + ef.d_arg * (gap * v - lh * xi / dt);

            // +F_e in row e, and -F_e in row e + 1 unless that is the
            // zero-flux row, where F_{I+1/2} appears with a plus sign.
            let targets: [(usize, f64); 2] = if e < cells {
                [(e, 1.0), (e + 1, -1.0)]
            } else {
                [(e, 1.0), (e + 1, 1.0)]
            };
            for (row, sign) in targets {
                f[row] += sign * ef.value;
                jac.add(row, e, sign * ef.d_left);
                jac.add(row, e + 1, sign * ef.d_right);
                jac.add(row, cx0, sign * d_x0);
                jac.add(row, cx1, sign * d_x1);
                jac.add(row, cl, sign * d_l);
            }
        }

        // Left exchange condition.
        f[0] += -p.a + p.b * u[0];
        jac.add(0, 0, p.b);

        // Cell balances.
        for i in 1..=cells {
            let h = mesh.h(i);
            f[i] += h * (width * u[i] - prev.width * prev.u[i]) / dt;
            jac.add(i, i, h * width / dt);
            jac.add(i, cl, h * u[i] / dt);
        }

        // Interface laws and closure.
        f[n] = dx0 - p.alpha0 + p.beta0 * u[0] - (1.0 - p.r) * dx1;
        jac.add(n, cx0, 1.0 / dt);
        jac.add(n, 0, p.beta0);
        jac.add(n, cx1, -(1.0 - p.r) / dt);

        f[n + 1] = dx1 + p.alpha1 - p.beta1 * u[cells + 1];
        jac.add(n + 1, cx1, 1.0 / dt);
        jac.add(n + 1, cells + 1, -p.beta1);

        f[n + 2] = width - x1 + x0;
        jac.add(n + 2, cl, 1.0);
        jac.add(n + 2, cx1, -1.0);
        jac.add(n + 2, cx0, 1.0);

        (f, jac)
    }

    fn check(&self, x: &[f64], width_floor: f64) -> Option<Violation> {
        let n = self.mesh.cells() + 2;
        if !(x[n + 2] > width_floor) {
            Some(Violation::Width)
        } else if x[..n].iter().any(|&v| !(v >= 0.0)) {
            Some(Violation::Negative)
        } else {
            None
        }
    }
}

/// Continuation family joining an explicitly solvable linear system
/// (`lambda = 0`) to the scheme (`lambda = 1`).
///
/// Unknowns are `(u_1, ..., u_{I+1}, u_0, X1, L)`: the trace `u_0` enters
/// every edge velocity, so it is a border column next to `X1` and `L`.
/// `X0` is recovered afterwards as `X1 - L`.
pub struct HomotopySystem<'a> {
    pub prev: &'a State,
    pub mesh: &'a Mesh,
    pub dt: f64,
    pub params: &'a ModelParams,
    pub lambda: f64,
}

impl HomotopySystem<'_> {
    /// Closed-form solution at `lambda = 0`.
    pub fn start_point(&self) -> Vec<f64> {
        let cells = self.mesh.cells();
        let mut x = Vec::with_capacity(cells + 4);
        x.extend_from_slice(&self.prev.u[1..=cells]);
        x.push(self.params.ratio1());
        x.push(self.params.ratio0());
        x.push(self.prev.x1);
        x.push(self.prev.width);
        x
    }

    pub fn to_state(&self, x: &[f64]) -> State {
        let cells = self.mesh.cells();
        let n = cells + 1;
        let mut u = Vec::with_capacity(cells + 2);
        u.push(x[n]);
        u.extend_from_slice(&x[..n]);
        let (x1, width) = (x[n + 1], x[n + 2]);
        State {
            u,
            x0: x1 - width,
            x1,
            width,
        }
    }

    pub fn from_state(state: &State) -> Vec<f64> {
        let cells = state.cells();
        let mut x = state.u[1..=cells + 1].to_vec();
        x.extend([state.u[0], state.x1, state.width]);
        x
    }

    /// Residual of the `lambda` system.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        NonlinearSystem::residual(self, x)
    }
}

impl NonlinearSystem for HomotopySystem<'_> {
    fn assemble(&self, x: &[f64]) -> (Vec<f64>, BorderedMatrix) {
        let mesh = self.mesh;
        let p = self.params;
        let prev = self.prev;
        let dt = self.dt;
        let lam = self.lambda;
        let cells = mesh.cells();
        let n = cells + 1;
        let (cu0, cx1, cl) = (n, n + 1, n + 2);
        let (u0, x1, width) = (x[cu0], x[cx1], x[cl]);
        // Concentration u_i sits in column col(i).
        let col = |i: usize| if i == 0 { cu0 } else { i - 1 };
        let u = |i: usize| x[col(i)];

        let dx1 = (x1 - prev.x1) / dt;
        let dl = (width - prev.width) / dt;
        let drift0 = p.beta0 * u0 - p.alpha0;

        let mut f = vec![0.0; n + 3];
        let mut jac = BorderedMatrix::zeros(n, 3);
        // Row of the equation that receives +F_e and the row that receives
        // -F_e.
        let row_left = n;
        let row_of_cell = |i: usize| i - 1;
        let row_right = cells;

        for e in 0..=cells {
            let xi = mesh.edges()[e];
            let gap = mesh.gaps()[e];
            let v = -p.r * dx1 * xi + (1.0 - xi) * drift0;
            let ef = edge_flux(u(e), u(e + 1), v, width, gap);
            let lh = width * gap;
            let d_u0_arg = ef.d_arg * lh * (1.0 - xi) * p.beta0;
            let d_x1 = ef.d_arg * (-lh * p.r * xi / dt);
            let d_l = ef.d_width + ef.d_arg * gap * v;

            let plus_row = if e == 0 { row_left } else { row_of_cell(e) };
            let minus_row = if e < cells { Some(row_of_cell(e + 1)) } else { None };
            let mut rows = vec![(plus_row, lam)];
            match minus_row {
                Some(r) => rows.push((r, -lam)),
                None => rows.push((row_right, -lam)),
            }
            for (row, s) in rows {
                f[row] += s * ef.value;
                jac.add(row, col(e), s * ef.d_left);
                jac.add(row, col(e + 1), s * ef.d_right);
                jac.add(row, cu0, s * d_u0_arg);
                jac.add(row, cx1, s * d_x1);
                jac.add(row, cl, s * d_l);
            }
        }

        // Cell balances: h [lam (L - Lp) u_i + Lp (u_i - up_i)] / dt.
        for i in 1..=cells {
            let h = mesh.h(i);
            let row = row_of_cell(i);
            let ui = u(i);
            f[row] += h * (lam * (width - prev.width) * ui + prev.width * (ui - prev.u[i])) / dt;
            jac.add(row, col(i), h * (lam * (width - prev.width) + prev.width) / dt);
            jac.add(row, cl, h * lam * ui / dt);
        }

        // Left: lam (F - a + b u0) + (1 - lam)(beta0 u0 - alpha0).
        f[row_left] += lam * (-p.a + p.b * u0) + (1.0 - lam) * drift0;
        jac.add(row_left, cu0, lam * p.b + (1.0 - lam) * p.beta0);

        // Right: -lam F + (1 - lam)(beta1 u_{I+1} - alpha1), an outflow
        // condition oriented like the left one.
        let u_last = u(cells + 1);
        f[row_right] += (1.0 - lam) * (p.beta1 * u_last - p.alpha1);
        jac.add(row_right, col(cells + 1), (1.0 - lam) * p.beta1);

        // R d[X1] - d[L] - alpha0 + beta0 u0.
        f[n + 1] = p.r * dx1 - dl + drift0;
        jac.add(n + 1, cx1, p.r / dt);
        jac.add(n + 1, cl, -1.0 / dt);
        jac.add(n + 1, cu0, p.beta0);

        // d[X1] + alpha1 - beta1 u_{I+1}.
        f[n + 2] = dx1 + p.alpha1 - p.beta1 * u_last;
        jac.add(n + 2, cx1, 1.0 / dt);
        jac.add(n + 2, col(cells + 1), -p.beta1);

        (f, jac)
    }

    fn check(&self, x: &[f64], width_floor: f64) -> Option<Violation> {
        let n = self.mesh.cells() + 1;
        if !(x[n + 2] > width_floor) {
            Some(Violation::Width)
        } else if x[..=n].iter().any(|&v| !(v >= 0.0)) {
            Some(Violation::Negative)
        } else {
            None
        }
    }
}

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone)]
pub(crate) struct NewtonReport {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_inf: f64,
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

const MAX_HALVINGS: usize = 30;

/// Damped Newton iteration. Converged when the sup norm of the full Newton
/// increment drops to `opts.newton_tol`; the step is halved whenever it
/// would leave the admissible set.
pub(crate) fn newton<S: NonlinearSystem>(
    sys: &S,
    mut x: Vec<f64>,
    opts: &SolverOptions,
) -> Result<NewtonReport> {
    let mut width_limited = false;
    let mut last_increment = f64::INFINITY;
    for iter in 1..=opts.max_newton_iters {
        let (f, jac) = sys.assemble(&x);
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: iter,
                increment: last_increment,
            });
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = jac.solve(&rhs)?;
        let increment = inf_norm(&delta);
        last_increment = increment;

        let mut step = 1.0;
        let mut halvings = 0;
        let trial = loop {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + step * di).collect();
            match sys.check(&trial, opts.width_floor) {
                None => break Some(trial),
                Some(violation) => {
                    width_limited = violation == Violation::Width;
                    if halvings == MAX_HALVINGS {
                        break None;
                    }
                    halvings += 1;
                    step *= 0.5;
                }
            }
        };
        let Some(trial) = trial else {
            return Err(if width_limited {
                Error::WidthCollapsed {
                    width: opts.width_floor,
                }
            } else {
                Error::NoConvergence {
                    iterations: iter,
                    increment,
                }
            });
        };
        x = trial;
        if halvings == 0 && increment <= opts.newton_tol {
            let residual_inf = inf_norm(&sys.residual(&x));
            return Ok(NewtonReport {
                x,
                iterations: iter,
                residual_inf,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_newton_iters,
        increment: last_increment,
    })
}

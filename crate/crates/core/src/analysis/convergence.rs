use std::thread;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TimeGrid};
use crate::params::ModelParams;
use crate::scheme::{run, RunOptions};
use crate::state::{InitialMode, Termination, Trajectory};

/// A reference solution averaged onto a coarser space-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedField {
    /// `u[n - 1][i - 1]`: average over `(t_{n-1}, t_n) x cell i`.
    pub u: Vec<Vec<f64>>,
    /// Time averages of `X0` and `X1` over each coarse interval.
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
}

const NESTING_TOL: f64 = 1e-9;

/// For each coarse cell, the range of fine cells it covers.
fn cell_map(fine: &Mesh, coarse: &Mesh) -> Result<Vec<std::ops::Range<usize>>> {
    let fe = fine.edges();
    let mut map = Vec::with_capacity(coarse.cells());
    let mut j = 0;
    for w in coarse.edges().windows(2) {
        let start = j;
        while j < fine.cells() && fe[j + 1] <= w[1] + NESTING_TOL {
            j += 1;
        }
        if j == start || (fe[start] - w[0]).abs() > NESTING_TOL || (fe[j] - w[1]).abs() > NESTING_TOL {
            return Err(Error::NotNested(format!(
                "coarse cell [{}, {}] is not a union of fine cells",
                w[0], w[1]
            )));
        }
        map.push(start..j);
    }
    Ok(map)
}

/// Measure-weighted average of a dense fine trajectory over each coarse
/// space-time cell.
pub fn project_reference(
    fine: &Trajectory,
    fine_mesh: &Mesh,
    coarse_mesh: &Mesh,
    coarse_time: TimeGrid,
) -> Result<ProjectedField> {
    if !fine.is_dense() {
        return Err(Error::NotNested("reference trajectory is not dense".into()));
    }
    let ratio = coarse_time.dt() / fine.time_grid.dt();
    let q = ratio.round() as usize;
    if q == 0 || (ratio - q as f64).abs() > NESTING_TOL * ratio {
        return Err(Error::NotNested(format!(
            "coarse time step is {ratio} fine steps"
        )));
    }
    let needed = coarse_time.steps() * q;
    if fine.last_index() < needed {
        return Err(Error::NotNested(format!(
            "reference reaches level {} of {needed}",
            fine.last_index()
        )));
    }
    let cells = cell_map(fine_mesh, coarse_mesh)?;
    let hf = fine_mesh.sizes();

    let mut out = ProjectedField {
        u: Vec::with_capacity(coarse_time.steps()),
        x0: Vec::with_capacity(coarse_time.steps()),
        x1: Vec::with_capacity(coarse_time.steps()),
    };
    for n in 1..=coarse_time.steps() {
        let levels = &fine.states[(n - 1) * q + 1..=n * q];
        let qf = q as f64;
        out.x0.push(levels.iter().map(|s| s.x0).sum::<f64>() / qf);
        out.x1.push(levels.iter().map(|s| s.x1).sum::<f64>() / qf);
        let row = cells
            .iter()
            .zip(coarse_mesh.sizes())
            .map(|(range, hc)| {
                let sum: f64 = levels
                    .iter()
                    .map(|s| range.clone().map(|j| hf[j] * s.u[j + 1]).sum::<f64>())
                    .sum();
                sum / (qf * hc)
            })
            .collect();
        out.u.push(row);
    }
    Ok(out)
}

/// Grid hierarchy: level `k` has `base_cells * 2^k` cells and
/// `base_steps * 4^k` steps on `[0, t_final]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig {
    /// Levels `0..=levels` are compared with the reference.
    pub levels: usize,
    pub reference_level: usize,
    pub t_final: f64,
    pub base_cells: usize,
    pub base_steps: usize,
    pub initial_mode: InitialMode,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            reference_level: 4,
            t_final: 0.2,
            base_cells: 50,
            base_steps: 10,
            initial_mode: InitialMode::CellAverage,
        }
    }
}

impl ConvergenceConfig {
    pub fn grid(&self, k: usize) -> Result<(Mesh, TimeGrid)> {
        let steps = self.base_steps * 4usize.pow(k as u32);
        let mesh = Mesh::uniform(self.base_cells << k)?;
        let grid = TimeGrid::new(self.t_final / steps as f64, steps)?;
        Ok((mesh, grid))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub k: usize,
    pub cells: usize,
    pub steps: usize,
    pub h: f64,
    pub dt: f64,
    pub err_w: f64,
    pub rate_w: Option<f64>,
    pub err_x0: f64,
    pub rate_x0: Option<f64>,
    pub err_x1: f64,
    pub rate_x1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub reference_level: usize,
    pub levels: Vec<ConvergenceLevel>,
}

impl ConvergenceReport {
    pub fn mean_rate_w(&self) -> Option<f64> {
        let rates: Vec<f64> = self.levels.iter().filter_map(|l| l.rate_w).collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

fn run_level(params: &ModelParams, cfg: &ConvergenceConfig, k: usize) -> Result<(Mesh, Trajectory)> {
    let wrap = |e: Error| Error::Level {
        level: k,
        source: Box::new(e),
    };
    let (mesh, grid) = cfg.grid(k).map_err(wrap)?;
    let traj = run(params, &mesh, grid, &RunOptions::for_params(params), cfg.initial_mode).map_err(wrap)?;
    match traj.termination {
        Termination::Completed => Ok((mesh, traj)),
        Termination::WidthCollapsed(_) => Err(wrap(Error::WidthCollapsed {
            width: traj.last().width,
        })),
        Termination::SolverFailed(n) => Err(wrap(Error::NoConvergence {
            iterations: n,
            increment: f64::NAN,
        })),
    }
}

fn rate(prev: f64, cur: f64, scale_prev: f64, scale_cur: f64) -> f64 {
    (prev / cur).ln() / (scale_prev / scale_cur).ln()
}

/// Nested-grid refinement study against the finest level.
///
/// All levels run concurrently. The concentration error is the space-time
/// `L2` distance over the interior cells; interface errors are sup-norms
/// over the coarse time levels. Rates for `w` are taken against `h`, for
/// the interfaces against `dt`.
pub fn convergence_study(params: &ModelParams, cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    params.validate()?;
    if cfg.reference_level <= cfg.levels {
        return Err(Error::NotNested(format!(
            "reference level {} must exceed the finest compared level {}",
            cfg.reference_level, cfg.levels
        )));
    }
    let mut results: Vec<Result<(Mesh, Trajectory)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..=cfg.levels)
            .chain([cfg.reference_level])
            .map(|k| scope.spawn(move || run_level(params, cfg, k)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level thread panicked"))
            .collect()
    });
    let (ref_mesh, reference) = results.pop().expect("reference level")?;
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut levels: Vec<ConvergenceLevel> = Vec::with_capacity(runs.len());
    for (k, (mesh, traj)) in runs.iter().enumerate() {
        let proj = project_reference(&reference, &ref_mesh, mesh, traj.time_grid)?;
        let dt = traj.time_grid.dt();
        let mut sq = 0.0;
        let (mut e0, mut e1) = (0.0f64, 0.0f64);
        for n in 1..=traj.time_grid.steps() {
            let s = &traj.states[n];
            let row = &proj.u[n - 1];
            sq += dt
                * mesh
                    .sizes()
                    .iter()
                    .zip(&s.u[1..=mesh.cells()])
                    .zip(row)
                    .map(|((h, u), p)| h * (u - p).powi(2))
                    .sum::<f64>();
            e0 = e0.max((s.x0 - proj.x0[n - 1]).abs());
            e1 = e1.max((s.x1 - proj.x1[n - 1]).abs());
        }
        let mut level = ConvergenceLevel {
            k,
            cells: mesh.cells(),
            steps: traj.time_grid.steps(),
            h: mesh.max_size(),
            dt,
            err_w: sq.sqrt(),
            rate_w: None,
            err_x0: e0,
            rate_x0: None,
            err_x1: e1,
            rate_x1: None,
        };
        if let Some(p) = levels.last() {
            level.rate_w = Some(rate(p.err_w, level.err_w, p.h, level.h));
            level.rate_x0 = Some(rate(p.err_x0, level.err_x0, p.dt, level.dt));
            level.rate_x1 = Some(rate(p.err_x1, level.err_x1, p.dt, level.dt));
        }
        levels.push(level);
    }
    Ok(ConvergenceReport {
        reference_level: cfg.reference_level,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{State, StepInfo};

    fn constant_traj(mesh: &Mesh, grid: TimeGrid, f: impl Fn(usize, usize) -> f64) -> Trajectory {
        let states = (0..=grid.steps())
            .map(|n| {
                let u = (0..mesh.cells() + 2).map(|i| f(n, i)).collect();
                State::new(u, 0.1 * n as f64, 1.0 + 0.1 * n as f64)
            })
            .collect();
        Trajectory {
            states,
            indices: (0..=grid.steps()).collect(),
            steps: vec![
                StepInfo {
                    newton_iters: 1,
                    residual_inf: 0.0,
                    used_homotopy: false
                };
                grid.steps()
            ],
            time_grid: grid,
            termination: Termination::Completed,
        }
    }

    #[test]
    fn constant_projects_to_constant() {
        let fine = Mesh::uniform(8).unwrap();
        let coarse = Mesh::uniform(4).unwrap();
        let traj = constant_traj(&fine, TimeGrid::new(0.25, 8).unwrap(), |_, _| 3.5);
        let p = project_reference(&traj, &fine, &coarse, TimeGrid::new(1.0, 2).unwrap()).unwrap();
        assert_eq!(p.u.len(), 2);
        for row in &p.u {
            for &v in row {
                assert!((v - 3.5).abs() < 1e-14);
            }
        }
        // X0 = 0.1 n averaged over levels 1..=4 and 5..=8.
        assert!((p.x0[0] - 0.25).abs() < 1e-14);
        assert!((p.x0[1] - 0.65).abs() < 1e-14);
    }

    #[test]
    fn two_cells_average() {
        let fine = Mesh::uniform(2).unwrap();
        let coarse = Mesh::uniform(1).unwrap();
        let traj = constant_traj(&fine, TimeGrid::new(1.0, 1).unwrap(), |_, i| if i == 1 { 1.0 } else { 3.0 });
        let p = project_reference(&traj, &fine, &coarse, TimeGrid::new(1.0, 1).unwrap()).unwrap();
        assert!((p.u[0][0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn idempotent_on_coarse_data() {
        let mesh = Mesh::uniform(5).unwrap();
        let grid = TimeGrid::new(0.5, 3).unwrap();
        let traj = constant_traj(&mesh, grid, |n, i| (n * 7 + i * i) as f64);
        let p = project_reference(&traj, &mesh, &mesh, grid).unwrap();
        for n in 1..=3 {
            for (a, b) in p.u[n - 1].iter().zip(&traj.states[n].u[1..=5]) {
                assert!((a - b).abs() <= 1e-14 * b.abs());
            }
        }
    }

    #[test]
    fn projection_preserves_space_time_mass() {
        let fine = Mesh::uniform(12).unwrap();
        let coarse = Mesh::uniform(3).unwrap();
        let fg = TimeGrid::new(0.1, 12).unwrap();
        let cg = TimeGrid::new(0.4, 3).unwrap();
        let traj = constant_traj(&fine, fg, |n, i| ((n * 31 + i * 17) % 11) as f64);
        let p = project_reference(&traj, &fine, &coarse, cg).unwrap();
        let fine_mass: f64 = (1..=12)
            .map(|n| 0.1 * fine.weighted_sum(&traj.states[n].u))
            .sum();
        let coarse_mass: f64 = p
            .u
            .iter()
            .map(|row| 0.4 * row.iter().zip(coarse.sizes()).map(|(v, h)| v * h).sum::<f64>())
            .sum();
        assert!((fine_mass - coarse_mass).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_nested() {
        let fine = Mesh::uniform(5).unwrap();
        let coarse = Mesh::uniform(2).unwrap();
        let grid = TimeGrid::new(0.5, 2).unwrap();
        let traj = constant_traj(&fine, grid, |_, _| 1.0);
        assert!(matches!(
            project_reference(&traj, &fine, &coarse, grid),
            Err(Error::NotNested(_))
        ));
        let coarse = Mesh::uniform(5).unwrap();
        assert!(project_reference(&traj, &fine, &coarse, TimeGrid::new(0.75, 1).unwrap()).is_err());
        assert!(project_reference(&traj, &fine, &coarse, TimeGrid::new(0.5, 3).unwrap()).is_err());
    }

    #[test]
    fn equilibrium_study_has_no_error() {
        let mut p = ModelParams::testcase1();
        p.a = 1.0;
        p.b = 1.0;
        p.alpha0 = 1.0;
        p.beta0 = 1.0;
        p.alpha1 = 1.0;
        p.beta1 = 1.0;
        p.u_init = crate::params::InitialProfile::constant(1.0);
        let cfg = ConvergenceConfig {
            levels: 1,
            reference_level: 2,
            base_cells: 4,
            base_steps: 2,
            ..ConvergenceConfig::default()
        };
        let rep = convergence_study(&p, &cfg).unwrap();
        assert_eq!(rep.levels.len(), 2);
        for l in &rep.levels {
            assert!(l.err_w < 1e-12 && l.err_x0 < 1e-12 && l.err_x1 < 1e-12, "{l:?}");
        }
    }

    #[test]
    fn reference_must_be_finer() {
        let cfg = ConvergenceConfig {
            levels: 2,
            reference_level: 2,
            ..ConvergenceConfig::default()
        };
        assert!(convergence_study(&ModelParams::testcase1(), &cfg).is_err());
    }
}

//! CSV writers. Floats use `{:.16e}`, i.e. 17 significant digits, so
//! identical runs produce byte-identical files.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use oxide_fv::analysis::{mass_balance_defect, tw_distance, ConvergenceReport};
use oxide_fv::energy::LedgerEntry;
use oxide_fv::{Mesh, ModelParams, Trajectory, TravellingWave};

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

/// `steps.csv`: one row per stored level. `d` is empty without a wave,
/// solver columns are empty at `n = 0`.
pub fn write_steps(path: &Path, traj: &Trajectory, mesh: &Mesh, wave: Option<&TravellingWave>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "t", "X0", "X1", "L", "u0", "uI1", "d", "newton_iters", "residual_inf"])?;
    for (k, s) in traj.states.iter().enumerate() {
        let n = traj.indices[k];
        let info = n.checked_sub(1).and_then(|m| traj.steps.get(m));
        w.write_record([
            n.to_string(),
            fmt(traj.time_of(k)),
            fmt(s.x0),
            fmt(s.x1),
            fmt(s.width),
            fmt(s.u[0]),
            fmt(*s.u.last().unwrap()),
            opt(wave.map(|wv| tw_distance(s, mesh, wv))),
            info.map(|i| i.newton_iters.to_string()).unwrap_or_default(),
            opt(info.map(|i| i.residual_inf)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `profile.csv`: the last stored state, traces included.
pub fn write_profile(path: &Path, traj: &Trajectory, mesh: &Mesh) -> Result<()> {
    let s = traj.last();
    let mut w = writer(path)?;
    w.write_record(["i", "xi_center", "x_physical", "u"])?;
    for (i, (&u, &xi)) in s.u.iter().zip(mesh.centers()).enumerate() {
        w.write_record([i.to_string(), fmt(xi), fmt(s.x0 + s.width * xi), fmt(u)])?;
    }
    w.flush()?;
    Ok(())
}

/// `diagnostics.csv`: per-level summary with the discrete mass balance.
pub fn write_diagnostics(
    path: &Path,
    traj: &Trajectory,
    mesh: &Mesh,
    params: &ModelParams,
    wave: Option<&TravellingWave>,
) -> Result<()> {
    let dt = traj.time_grid.dt();
    let mut w = writer(path)?;
    w.write_record(["t", "X0", "X1", "L", "u0", "uI1", "d", "mass_balance_defect"])?;
    for (k, s) in traj.states.iter().enumerate() {
        let defect = (k > 0 && traj.indices[k] == traj.indices[k - 1] + 1)
            .then(|| mass_balance_defect(&traj.states[k - 1], s, mesh, dt, params));
        w.write_record([
            fmt(traj.time_of(k)),
            fmt(s.x0),
            fmt(s.x1),
            fmt(s.width),
            fmt(s.u[0]),
            fmt(*s.u.last().unwrap()),
            opt(wave.map(|wv| tw_distance(s, mesh, wv))),
            opt(defect),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `energy_<phi>.csv`.
pub fn write_energy(path: &Path, entries: &[LedgerEntry]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["n", "t", "H", "H_tot", "D_bulk", "D_bound"])?;
    for e in entries {
        w.write_record([
            e.n.to_string(),
            fmt(e.t),
            fmt(e.free_energy),
            fmt(e.total_free_energy),
            fmt(e.d_bulk),
            fmt(e.d_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `convergence.csv`; rates are empty on the coarsest level.
pub fn write_convergence(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "k", "cells", "steps", "h", "dt", "err_w", "rate_w", "err_X0", "rate_X0", "err_X1", "rate_X1",
    ])?;
    for l in &report.levels {
        w.write_record([
            l.k.to_string(),
            l.cells.to_string(),
            l.steps.to_string(),
            fmt(l.h),
            fmt(l.dt),
            fmt(l.err_w),
            opt(l.rate_w),
            fmt(l.err_x0),
            opt(l.rate_x0),
            fmt(l.err_x1),
            opt(l.rate_x1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

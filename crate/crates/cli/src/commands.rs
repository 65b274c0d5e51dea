use std::fmt::Write as _;
use std::fs;

use anyhow::Context;
use oxide_fv::analysis::{convergence_study, guaranteed_horizon, ConvergenceConfig};
use oxide_fv::energy::{Density, EnergyLedger};
use oxide_fv::tw::DEFAULT_TOLERANCE;
use oxide_fv::{classify, run, Mesh, RegimeClassification, RunOptions, Termination, TimeGrid, Trajectory};

use crate::config::RunConfig;
use crate::output;
use crate::Failure;

fn wave_of(cfg: &RunConfig) -> Option<oxide_fv::TravellingWave> {
    classify(&cfg.params, DEFAULT_TOLERANCE)
        .ok()
        .and_then(|c| c.wave().copied())
}

fn integrate(cfg: &RunConfig) -> Result<(Mesh, Trajectory), Failure> {
    let mesh = Mesh::uniform(cfg.cells).map_err(|e| crate::ConfigError {
        line: None,
        message: e.to_string(),
    })?;
    let grid = TimeGrid::from_horizon(cfg.t_final, cfg.dt).map_err(|e| crate::ConfigError {
        line: None,
        message: e.to_string(),
    })?;
    let opts = RunOptions {
        solver: cfg.solver,
        stride: 1,
    };
    let traj = run(&cfg.params, &mesh, grid, &opts, cfg.initial_mode).map_err(|e| Failure::Solver(e.to_string()))?;
    Ok((mesh, traj))
}

/// Outcome of a finished trajectory, after its output has been written.
fn termination(traj: &Trajectory) -> Result<(), Failure> {
    let s = traj.last();
    match traj.termination {
        Termination::Completed => Ok(()),
        Termination::WidthCollapsed(n) => Err(Failure::Collapse(format!(
            "width reached the floor at step {n} (t = {:.6}, last stored L = {:e})",
            traj.time_grid.time(n),
            s.width
        ))),
        Termination::SolverFailed(n) => Err(Failure::Solver(format!(
            "no convergence at step {n} (t = {:.6})",
            traj.time_grid.time(n)
        ))),
    }
}

fn summary(traj: &Trajectory) -> String {
    let s = traj.last();
    format!(
        "t = {:.6}  X0 = {:.10}  X1 = {:.10}  L = {:.10}\n",
        traj.time_of(traj.states.len() - 1),
        s.x0,
        s.x1,
        s.width
    )
}

fn horizon_note(cfg: &RunConfig) -> String {
    match guaranteed_horizon(&cfg.params) {
        Some(t) if cfg.t_final > t => format!(
            "note: t_final = {} exceeds the horizon {t:.6} on which the width is guaranteed positive\n",
            cfg.t_final
        ),
        _ => String::new(),
    }
}

/// Writes `steps.csv`, `profile.csv` and `diagnostics.csv` into `cfg.out`.
pub fn simulate(cfg: &RunConfig) -> Result<String, Failure> {
    let (mesh, traj) = integrate(cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let wave = wave_of(cfg);
    output::write_steps(&cfg.out.join("steps.csv"), &traj, &mesh, wave.as_ref())?;
    output::write_profile(&cfg.out.join("profile.csv"), &traj, &mesh)?;
    output::write_diagnostics(&cfg.out.join("diagnostics.csv"), &traj, &mesh, &cfg.params, wave.as_ref())?;
    termination(&traj)?;
    Ok(horizon_note(cfg) + &summary(&traj))
}

/// Regime classification; writes nothing.
pub fn tw(cfg: &RunConfig) -> Result<String, Failure> {
    let class = classify(&cfg.params, DEFAULT_TOLERANCE).map_err(|e| Failure::Solver(e.to_string()))?;
    Ok(match class {
        RegimeClassification::UniqueWave(w) => format!(
            "travelling wave\nc_hat = {:.16}\nL_hat = {:.16}\nlevel = {:.16}\n",
            w.c_hat, w.l_hat, w.level
        ),
        RegimeClassification::EquilibriumContinuum(level) => {
            format!("equilibrium continuum: every constant state u = {level:.16} is stationary\n")
        }
        RegimeClassification::NoWave => "no travelling wave\n".to_string(),
    })
}

/// Replays a run under one density, or the whole family, and writes
/// `energy_<phi>.csv`.
pub fn energy(cfg: &RunConfig) -> Result<String, Failure> {
    let (mesh, traj) = integrate(cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let dt = traj.time_grid.dt();
    let densities: Vec<Density> = Density::family(&cfg.params)
        .into_iter()
        .filter(|d| cfg.phi.as_deref().is_none_or(|name| d.name() == name))
        .collect();
    let mut msg = horizon_note(cfg);
    for d in densities {
        let name = d.name();
        let ledger = EnergyLedger::from_trajectory(d, &traj, &mesh, &cfg.params);
        output::write_energy(&cfg.out.join(format!("energy_{name}.csv")), &ledger.entries)?;
        let worst = ledger.balance(dt).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(msg, "{name}: max balance {worst:.3e}");
    }
    termination(&traj)?;
    Ok(msg)
}

/// Grid refinement study; writes `convergence.csv` and prints the table.
pub fn converge(cfg: &RunConfig) -> Result<String, Failure> {
    let study = ConvergenceConfig {
        levels: cfg.levels,
        reference_level: cfg.ref_level,
        t_final: cfg.converge_t_final,
        initial_mode: cfg.initial_mode,
        ..ConvergenceConfig::default()
    };
    let report = convergence_study(&cfg.params, &study).map_err(|e| Failure::Solver(e.to_string()))?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    output::write_convergence(&cfg.out.join("convergence.csv"), &report)?;

    let rate = |r: Option<f64>| r.map(|r| format!("{r:.2}")).unwrap_or_else(|| "-".into());
    let mut msg = format!(
        "{:>2} {:>6} {:>6} {:>11} {:>6} {:>11} {:>6} {:>11} {:>6}\n",
        "k", "cells", "steps", "err_w", "rate", "err_X0", "rate", "err_X1", "rate"
    );
    for l in &report.levels {
        let _ = writeln!(
            msg,
            "{:>2} {:>6} {:>6} {:>11.4e} {:>6} {:>11.4e} {:>6} {:>11.4e} {:>6}",
            l.k,
            l.cells,
            l.steps,
            l.err_w,
            rate(l.rate_w),
            l.err_x0,
            rate(l.rate_x0),
            l.err_x1,
            rate(l.rate_x1)
        );
    }
    if let Some(m) = report.mean_rate_w() {
        let _ = writeln!(msg, "mean rate_w = {m:.3}");
    }
    Ok(msg)
}

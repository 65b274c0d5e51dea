use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oxide_fv_cli::config::{parse_raw, resolve};
use oxide_fv_cli::{commands, ConfigError, Experiment, Failure, RawConfig, RunConfig};

/// Finite-volume simulations of an oxide layer with moving interfaces.
///
/// Exit status: 0 success, 2 configuration error, 3 solver failure,
/// 4 width collapse (partial output is still written).
#[derive(Parser)]
#[command(name = "oxide-fv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scheme and write steps, profile and diagnostics CSVs.
    Simulate(Common),
    /// Classify the regime and print the travelling wave if there is one.
    Tw(Common),
    /// Integrate and write the free-energy ledger for each density.
    Energy(Common),
    /// Grid refinement study against a fine reference solution.
    Converge(Common),
    /// Run the experiment named by the config's `experiment` key.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// Named parameter set: testcase1, testcase2 or testcase3.
    #[arg(long)]
    preset: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time (for `converge`, the study horizon).
    #[arg(long)]
    t_final: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Density for `energy`: quadratic, quartic, excess or entropy.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    ref_level: Option<usize>,
    /// average or sample.
    #[arg(long)]
    initial_mode: Option<String>,
}

fn load(common: &Common, converge: bool) -> Result<RunConfig, Failure> {
    let (mut raw, text) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            (parse_raw(&text)?, text)
        }
        None => (RawConfig::default(), String::new()),
    };
    if common.preset.is_some() {
        raw.preset = common.preset.clone();
    }
    if common.cells.is_some() {
        raw.cells = common.cells;
    }
    if common.dt.is_some() {
        raw.dt = common.dt;
    }
    if common.t_final.is_some() {
        if converge {
            raw.converge_t_final = common.t_final;
        } else {
            raw.t_final = common.t_final;
        }
    }
    if common.out.is_some() {
        raw.out = common.out.clone();
    }
    if common.phi.is_some() {
        raw.phi = common.phi.clone();
    }
    if common.levels.is_some() {
        raw.levels = common.levels;
    }
    if common.ref_level.is_some() {
        raw.ref_level = common.ref_level;
    }
    if common.initial_mode.is_some() {
        raw.initial_mode = common.initial_mode.clone();
    }
    Ok(resolve(&raw, &text)?)
}

fn dispatch(command: Command) -> Result<String, Failure> {
    let (common, experiment) = match command {
        Command::Simulate(c) => (c, Some(Experiment::Simulate)),
        Command::Tw(c) => (c, Some(Experiment::Tw)),
        Command::Energy(c) => (c, Some(Experiment::Energy)),
        Command::Converge(c) => (c, Some(Experiment::Converge)),
        Command::Run(c) => (c, None),
    };
    let cfg = load(&common, experiment == Some(Experiment::Converge))?;
    let experiment = match experiment.or(cfg.experiment) {
        Some(e) => e,
        None => {
            return Err(ConfigError {
                line: None,
                message: "`run` needs an `experiment` key in the config".into(),
            }
            .into())
        }
    };
    match experiment {
        Experiment::Simulate => commands::simulate(&cfg),
        Experiment::Tw => commands::tw(&cfg),
        Experiment::Energy => commands::energy(&cfg),
        Experiment::Converge => commands::converge(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(msg) => {
            print!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

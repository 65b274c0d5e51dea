//! Library side of the `oxide-fv` command: configuration files, CSV
//! output and the four experiments.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub use config::{parse_config, render, ConfigError, Experiment, RawConfig, RunConfig};

/// Why a command failed; each kind maps to its own exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("width collapse: {0}")]
    Collapse(String),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Collapse(_) => 4,
        }
    }
}

use thiserror::Error;

/// Errors raised by parameter validation and the time-stepping solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("mesh needs at least one cell")]
    EmptyMesh,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("initial profile is negative ({value}) at x = {x}")]
    NegativeInitialData { x: f64, value: f64 },

    #[error("invalid initial profile: {0}")]
    InvalidProfile(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("oxide width collapsed (L = {width:e})")]
    WidthCollapsed { width: f64 },

    #[error("nonlinear solver did not converge after {iterations} iterations (last increment {increment:e})")]
    NoConvergence { iterations: usize, increment: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("no travelling wave exists for these parameters")]
    NoTravellingWave,

    #[error("grids are not nested: {0}")]
    NotNested(String),

    #[error("solver failed at convergence level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { name, value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositive { name, value });
    }
    Ok(())
}

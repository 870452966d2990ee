use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("observation {0} outside [0, 1]")]
    ObservationOutOfRange(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("probability ratio undefined: value {value} has zero mass in one distribution")]
    UndefinedRatio { value: f64 },

    #[error("joint table marginal for {which} deviates from declared marginal by {deviation:e}")]
    MarginalMismatch { which: &'static str, deviation: f64 },

    #[error("probe contract violated: {0}")]
    ProbeContract(String),

    #[error("inner solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("unknown loss-stream generator `{0}`")]
    UnknownGenerator(String),

    #[error("incompatible experiment: {0}")]
    Incompatible(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

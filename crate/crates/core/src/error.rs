use std::path::PathBuf;

use thiserror::Error;

use crate::grid_fem::FieldP1;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("fractional order s = {0} is outside the admissible range")]
    OrderOutOfRange(f64),

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("incompatible data: {0}")]
    Incompatible(String),

    #[error("invalid step problem: {0}")]
    InvalidProblem(String),

    #[error("linear system is singular or not positive definite: {0}")]
    Singular(String),

    #[error("projected gradient stopped after {iterations} iterations with residual {residual:e}")]
    MaxIterations {
        iterations: usize,
        residual: f64,
        best: Box<FieldP1>,
    },

    #[error("active-set enumeration found no feasible stationary point")]
    NoValidActiveSet,

    #[error("time step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("time {t} is outside the recorded range [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown preset `{name}` (valid presets: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

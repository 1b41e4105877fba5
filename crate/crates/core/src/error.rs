use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected ({components} connected components)")]
    Disconnected { components: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("noise variance must be positive and finite, got {0}")]
    InvalidNoise(f64),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("singular design: information matrix condition number {condition:e} exceeds limit")]
    SingularDesign { condition: f64 },

    #[error("truth signal has zero norm")]
    ZeroNormTruth,

    #[error("no connected placement after {attempts} attempts")]
    ConnectivityNotAchieved { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by fitting, evaluation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("degenerate cluster {cluster}: all memberships are zero")]
    DegenerateCluster { cluster: usize },

    #[error("degenerate data: {distinct} distinct points, {clusters} clusters requested")]
    DegenerateData { distinct: usize, clusters: usize },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("degenerate separation: prototypes {0} and {1} coincide")]
    DegenerateSeparation(usize, usize),

    #[error("label length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("knowledge kind `{found}` does not match algorithm `{algorithm}` (expects `{expected}`)")]
    KindMismatch {
        algorithm: String,
        expected: String,
        found: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid experiment config: {}", .0.join("; "))]
    Schema(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

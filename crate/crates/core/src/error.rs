use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x = {x} lies below the support bound {x0}")]
    BelowSupport { x: f64, x0: f64 },

    #[error("could not bracket tail quantile for q = {q} after {doublings} doublings")]
    Bracketing { q: f64, doublings: usize },

    #[error("mean of the one-sided magnitude is undefined for alpha = {0} <= 1")]
    UndefinedMean(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation window is empty for alpha = {0} (requires alpha < 6)")]
    EmptyWindow(f64),

    #[error("{solver} eigensolver did not converge after {iterations} iterations")]
    NoConvergence { solver: &'static str, iterations: usize },

    #[error("normalizer kind {normalizer:?} does not match ensemble kind {ensemble:?}")]
    KindMismatch {
        normalizer: crate::tail::NormalizerKind,
        ensemble: crate::EnsembleKind,
    },

    #[error("invalid interval ({a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

use crate::geometry::PointN;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("projection solver did not converge (residual {residual:.3e}, last iterate {last:?})")]
    SolverFailure { last: PointN, residual: f64 },

    #[error("brute-force oracle failed: {0}")]
    OracleFailure(String),

    #[error("invalid F-sigma spec{}: {message}", level.map(|l| format!(" at level {l}")).unwrap_or_default())]
    InvalidSpec { level: Option<usize>, message: String },

    #[error("fixed-point iteration inconclusive after {iterations} iterations (residual {residual:.3e})")]
    Inconclusive { iterations: usize, residual: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn spec(level: Option<usize>, msg: impl Into<String>) -> Self {
        Error::InvalidSpec {
            level,
            message: msg.into(),
        }
    }
}

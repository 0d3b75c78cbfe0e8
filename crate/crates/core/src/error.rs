use std::io;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("block size {0} is not a power of two >= {1}")]
    InvalidSize(usize, usize),

    #[error("expected a {expected} matrix, got {found}")]
    KindMismatch { expected: String, found: String },

    #[error("matrix is not orthogonal (max deviation {0:.3e})")]
    NotOrthogonal(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("RDST design failed at step {step}: smallest singular value ratio {ratio:.3e} above tolerance")]
    NullSpace { step: usize, ratio: f64 },

    #[error("inconsistent inputs: reconstruction residual {0:.3e}")]
    Inconsistent(f64),

    #[error("index {index} out of range for {len} outputs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed {format} data: {reason}")]
    Format {
        format: &'static str,
        reason: String,
    },

    #[error("step sizes violate the convergence bound: gamma1*gamma2*|L|^2 = {0:.4} > 1")]
    StepSize(f64),

    #[error("solver diverged at iteration {iteration}: {reason}")]
    Diverged { iteration: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn format_err(format: &'static str, reason: impl Into<String>) -> Error {
    Error::Format {
        format,
        reason: reason.into(),
    }
}

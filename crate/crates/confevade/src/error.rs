//! Error types shared across the crate.

/// Coarse error category, used by callers (notably the CLI) to map
/// failures onto exit codes without matching every variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Malformed input: files, JSON, CSV.
    Input,
    /// A documented precondition was violated by the caller.
    Precondition,
    /// A numerical degeneracy was hit at runtime.
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error in {path} (line {line}): {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampling exhausted after {attempts} rejections; constraints may be unsatisfiable")]
    SamplingExhausted { attempts: usize },

    #[error("augmentation failed: {0}")]
    Augmentation(String),

    #[error("degenerate gradient: weight vector has zero norm")]
    DegenerateGradient,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. } | Error::InvalidModel(_) | Error::Io(_) | Error::Json(_) => {
                ErrorCategory::Input
            }
            Error::Precondition(_)
            | Error::DimensionMismatch { .. }
            | Error::SamplingExhausted { .. }
            | Error::Augmentation(_) => ErrorCategory::Precondition,
            Error::DegenerateGradient | Error::Calibration(_) => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

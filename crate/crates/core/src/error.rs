use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on dimension, expansion center, or degree cap.
    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Recursion asked for a coefficient that has not been computed yet.
    #[error("sequencing error: {0}")]
    Sequencing(String),

    #[error("accuracy target not reached: {0}")]
    Accuracy(String),

    #[error("ill-conditioned marching step: {0}")]
    Conditioning(String),

    /// Cole-Hopf transform underflowed; the message carries a suggested shift.
    #[error("scaling error: {0}")]
    Scaling(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Problem file failed validation at the given JSON path.
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

use thiserror::Error;

/// Errors surfaced by construction, evaluation, and I/O routines.
///
/// Optimality *checks* never error on a failed condition; they report
/// margins. Errors are reserved for malformed inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension violation: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("critical cone admits only the zero direction")]
    EmptyCone,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An evaluation point fell outside a spline or network domain while the
    /// out-of-domain policy was `error`.
    #[error("x = {x} outside domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    /// Two networks or layers cannot be combined or compared.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A model or report document violated its schema. `path` names the
    /// offending field, e.g. `layers[1].splines[0][2].knots`.
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    /// Malformed JSON (carries line/column from the parser).
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

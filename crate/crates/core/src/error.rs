use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive routine failed to reach its tolerance.
    #[error("numerical error: {msg} (best estimate {estimate:e}, achieved error {achieved:e})")]
    Numerical {
        msg: String,
        estimate: f64,
        achieved: f64,
    },

    /// Request exceeds a hard guard of the implementation (polynomial order, level count, ...).
    #[error("capability error: {0}")]
    Capability(String),

    /// A wavefunction did not satisfy the state preconditions (normalization, support).
    #[error("state error: {0}")]
    State(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn numerical(msg: impl Into<String>, estimate: f64, achieved: f64) -> Self {
        Error::Numerical {
            msg: msg.into(),
            estimate,
            achieved,
        }
    }

    /// True for failures of a numerical routine rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

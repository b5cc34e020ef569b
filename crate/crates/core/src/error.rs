//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid rational literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: lambda = {lambda} is not allowed here")]
    InvalidLambda { op: &'static str, lambda: String },

    /// A closed form disagreed with its defining sum in exact mode. This is
    /// never a user error; it means an identity the engine relies on broke.
    #[error("internal identity violation in {op}: {detail}")]
    IdentityViolation { op: &'static str, detail: String },

    #[error("no unique fixed point: {0}")]
    NoFixedPoint(String),

    #[error("orbit leaves the truncated space at step {step} (truncation {truncation})")]
    TruncationOverflow { step: usize, truncation: usize },

    #[error("float overflow at step {step}")]
    FloatOverflow { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub fn identity(op: &'static str, detail: impl Into<String>) -> Self {
        Error::IdentityViolation {
            op,
            detail: detail.into(),
        }
    }

    /// True for errors that indicate a broken internal identity rather than
    /// bad input; the CLI maps these to a distinct exit status.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::IdentityViolation { .. })
    }
}

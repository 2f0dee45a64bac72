use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: expected n >= {1}")]
    InvalidDimension(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point outside the punctured unit ball: |x| = {0}")]
    OutsideDomain(f64),

    #[error("the puncture x = 0 is not in the domain")]
    AtPuncture,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported variant: {0}")]
    Unsupported(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("modulus is infinite for a degenerate ring (r1 = r2 = {0})")]
    InfiniteModulus(f64),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use serde::Serialize;
use thiserror::Error;

use puncture_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid job: {0}")]
    Schema(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorObject {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    /// 2 for bad input, 3 for numeric failures and everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidDimension(..)
                | CoreError::DimensionMismatch { .. }
                | CoreError::OutsideDomain(_)
                | CoreError::AtPuncture
                | CoreError::InvalidParameter { .. }
                | CoreError::Unsupported(_)
                | CoreError::NotSquare { .. }
                | CoreError::NotApplicable(_) => 2,
                CoreError::InfiniteModulus(_) | CoreError::InsufficientResolution(_) | CoreError::Numerical(_) => 3,
            },
            CliError::Io(_) => 3,
        }
    }

    pub fn to_object(&self) -> ErrorObject {
        let exit_code = self.exit_code();
        let kind = match self {
            CliError::Io(_) => "io",
            _ if exit_code == 2 => "validation",
            _ => "numeric",
        };
        ErrorObject {
            kind,
            exit_code,
            message: self.to_string(),
        }
    }
}

//! Exit statuses: 0 success, 1 usage, 2 numerical non-convergence,
//! 3 invariant-suite failure.

use llr_core::Error;

pub const USAGE: u8 = 1;
pub const NUMERICAL: u8 = 2;
pub const INVARIANT: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature { .. }
            | Error::FitFailure { .. }
            | Error::Eigensolver(_)
            | Error::BracketFailure { .. }
            | Error::InsufficientData { .. } => Failure::numerical(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

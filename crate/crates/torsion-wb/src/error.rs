//! Error type shared by all modules.
//!
//! Errors are split into two kinds matching the process exit-code contract:
//! validation failures (bad input, violated preconditions) exit with 2,
//! numerical failures (non-convergence, ambiguous tolerances, decomposition
//! defects) exit with 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input does not satisfy a stated precondition (shape mismatch,
    /// non-flat boundary data, gap violation, inadmissible angle, ...).
    #[error("validation failure: {0}")]
    Validation(String),

    /// The computation itself failed (eigensolver did not converge, a
    /// singular value sits inside the tolerance ambiguity band, a
    /// decomposition defect was detected).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code for the CLI: 2 = validation, 3 = numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::Numerical(_) => 3,
        }
    }

    /// Machine-readable error kind tag used in stderr JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Numerical(_) => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

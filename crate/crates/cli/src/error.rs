use thiserror::Error;

use crate::spec::SpecError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("spec error: {0}")]
    Spec(#[from] SpecError),

    #[error("{0}")]
    Core(hsd_core::Error),

    #[error("{0}")]
    Budget(hsd_core::Error),

    #[error("{failed} check(s) did not pass")]
    VerificationFailed { failed: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<hsd_core::Error> for CliError {
    fn from(e: hsd_core::Error) -> Self {
        match e {
            hsd_core::Error::Budget { .. } => CliError::Budget(e),
            hsd_core::Error::UnknownCheck { .. } => CliError::Usage(e.to_string()),
            e => CliError::Core(e),
        }
    }
}

impl CliError {
    /// 0 success, 1 verification failure, 2 usage or parse error, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

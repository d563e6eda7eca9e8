use thiserror::Error;

use crate::roots::RootError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] teleamp_core::Error),

    #[error(transparent)]
    Root(#[from] RootError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// One or more validation checks failed.
    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },
}

impl HarnessError {
    /// 1 for failed validation, 2 for everything the user has to fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

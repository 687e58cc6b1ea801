use thiserror::Error;
use zfree_core::{DynError, EndoError, ExtError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<EndoError> for CliError {
    fn from(e: EndoError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ExtError> for CliError {
    fn from(e: ExtError) -> Self {
        CliError::Domain(e.to_string())
    }
}

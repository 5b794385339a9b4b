use padic_forge::Error as CoreError;
use thiserror::Error;

/// CLI failures, each mapped to a documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Cap(CoreError),
    #[error("verdict unknown: {0}")]
    Unknown(String),
    #[error("refuted: {0}")]
    Refuted(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Core(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Unknown(_) => 4,
            CliError::Refuted(_) => 5,
            CliError::Failed(_) | CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Syntax { .. } | CoreError::UnknownIdentifier { .. } => CliError::Parse(e.to_string()),
            CoreError::CapExceeded { .. } => CliError::Cap(e),
            CoreError::Uncertified { ref reason, refuted } => {
                if refuted {
                    CliError::Refuted(reason.clone())
                } else {
                    CliError::Unknown(reason.clone())
                }
            }
            other => CliError::Core(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

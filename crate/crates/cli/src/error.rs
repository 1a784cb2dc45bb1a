use strictqst::QstError;
use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Dimension(_) => 4,
            CliError::Infeasible(_) => 5,
        }
    }
}

impl From<QstError> for CliError {
    fn from(e: QstError) -> Self {
        match e {
            QstError::DimensionMismatch { .. } => CliError::Dimension(e.to_string()),
            QstError::Infeasible(_) | QstError::ZeroTrace => CliError::Infeasible(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

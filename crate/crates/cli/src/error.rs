use plankton_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonPositiveParameter { .. }
            | CoreError::InvalidHolling(_)
            | CoreError::NegativeState { .. }
            | CoreError::OutOfDomain { .. }
            | CoreError::WrongHolling { .. }
            | CoreError::NoPositiveRegime { .. }
            | CoreError::InvalidSpec(_) => CliError::Usage(e.to_string()),
            CoreError::NotAFixedPoint { .. }
            | CoreError::NoBracket { .. }
            | CoreError::RealEigenvalues { .. }
            | CoreError::Divergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

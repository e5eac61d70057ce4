use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Violation(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl From<bvsieve::Error> for CliError {
    fn from(e: bvsieve::Error) -> Self {
        match e {
            bvsieve::Error::InvalidArgument(_) | bvsieve::Error::Range(_) => CliError::Usage(e.to_string()),
            bvsieve::Error::Resource(_) => CliError::Resource(e.to_string()),
            bvsieve::Error::Cache(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

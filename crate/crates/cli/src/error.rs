use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    ValidationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::ValidationFailed(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }
}

impl From<bandedge::error::Error> for CliError {
    fn from(e: bandedge::error::Error) -> Self {
        use bandedge::error::Error;
        match e {
            Error::Io(io) => CliError::Io(io.to_string()),
            Error::Csv(c) if c.is_io_error() => CliError::Io(c.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

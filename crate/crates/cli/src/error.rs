use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or input documents (exit 2).
    #[error("{0}")]
    Usage(String),

    /// Reading or writing a file failed (exit 2).
    #[error("{0}")]
    Io(String),

    /// The input was understood but did not pass its checks (exit 1).
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<ctxprob::Error> for CliError {
    fn from(e: ctxprob::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

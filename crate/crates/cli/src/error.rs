use std::io;
use std::path::PathBuf;

/// Failures surfaced by a command, each tied to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Wrap a library error raised while diagnosing already-fitted models,
    /// where a failure means the numerics misbehaved rather than the input.
    pub(crate) fn numeric(err: windfit::Error) -> CliError {
        match err {
            windfit::Error::Io { path, source } => CliError::Io { path, source },
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<windfit::Error> for CliError {
    fn from(err: windfit::Error) -> Self {
        match err {
            windfit::Error::Io { path, source } => CliError::Io { path, source },
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

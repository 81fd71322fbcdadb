use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample cannot support a fit (too few points, zero variance, ...).
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// No family member with admissible parameters puts positive density on
    /// every observation.
    #[error("sample outside support: {0}")]
    Infeasible(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

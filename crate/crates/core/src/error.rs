use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A statistical estimate could not be formed from the given data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// An internal invariant was violated.
    #[error("internal error: {0}")]
    Internal(String),

    /// Checkpoint version/corruption problems.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors surfaced by the simulator library.
///
/// Disconnection of a multicast group is *not* an error anywhere in this
/// crate; operations that can fail to find a tree return `Option` instead.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on caller-supplied data was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A trace or results file could not be parsed.
    #[error("{path}:{line}: {message}")]
    FileFormat {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

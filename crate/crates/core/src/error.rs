use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("overflow: {0}")]
    Overflow(String),

    /// The heuristic could not decide; the caller must supply an override.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// A computed quantity contradicts the branch it was computed under.
    #[error("contradiction: {0}")]
    Contradiction(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

use thiserror::Error;

/// Errors raised by the core library.
///
/// `Budget` is kept apart from the other variants so callers can tell a
/// resource cap from a malformed input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid definition: {0}")]
    InvalidDefinition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: u128 },
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: u128) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToposError {
    #[error("invalid index category: {0}")]
    Index(String),

    #[error("functoriality violated: {0}")]
    Functoriality(String),

    #[error("naturality violated: {0}")]
    Naturality(String),

    #[error("type mismatch: {0}")]
    Mismatch(String),

    #[error("not a subobject: {0}")]
    NotSubobject(String),

    #[error("{what} exceeds the enumeration limit of {limit}")]
    TooLarge { what: String, limit: usize },

    #[error("functor validation failed: {0}")]
    Functor(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = ToposError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

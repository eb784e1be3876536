use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `pos` is a byte offset into the parsed text.
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("type error in `{expr}`: {msg}")]
    Type { expr: String, msg: String },
    #[error("equality precondition violated: {0}")]
    Mode(String),
    #[error("value node budget of {0} exceeded (raise NESTQL_MAX_VALUE_NODES)")]
    Budget(u64),
    #[error("malformed structure: {0}")]
    Structure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("evaluation error: {0}")]
    Runtime(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }

    pub(crate) fn ty(expr: impl ToString, msg: impl Into<String>) -> Self {
        Error::Type { expr: expr.to_string(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

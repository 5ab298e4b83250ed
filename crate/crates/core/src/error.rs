use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent user input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A file failed to parse; `line`/`column` are 1-based.
    #[error("{file}:{line}:{column}: {kind}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        kind: ParseErrorKind,
        message: String,
    },

    /// A size guard refused the computation.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A structural property that must hold did not; indicates a bug.
    #[error("verification failed: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ShapeMismatch,
    InvalidRational,
    DuplicateLabel,
    UnknownLabel,
    Distribution,
    Model,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::ShapeMismatch => "shape mismatch",
            ParseErrorKind::InvalidRational => "invalid rational",
            ParseErrorKind::DuplicateLabel => "duplicate action label",
            ParseErrorKind::UnknownLabel => "unknown action label",
            ParseErrorKind::Distribution => "invalid distribution",
            ParseErrorKind::Model => "inconsistent model",
        };
        f.write_str(s)
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("layout error: {0}")]
    Layout(String),
    #[error("composition error: {0}")]
    Composition(String),
    #[error("accounting error: {0}")]
    Accounting(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of a copula family or formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke a documented precondition (bad index, too few points).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Inconsistent or unusable configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input has too few rows to be used.
    #[error("size error: {0}")]
    Size(String),

    /// A perturbation amplitude makes a density negative.
    #[error("amplitude error: {0}")]
    Amplitude(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

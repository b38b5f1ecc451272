use thiserror::Error;

/// Errors produced by the bound computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("degenerate bound: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidPmf(_) => "invalid-pmf",
            Error::Domain(_) => "domain",
            Error::TooLarge(_) => "too-large",
            Error::Degenerate(_) => "degenerate",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by models, generators, samplers and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its tolerance or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A kernel, model and initialization that cannot be combined.
    #[error("configuration error: {0}")]
    Config(String),

    /// The series is constant, so autocorrelations are undefined.
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    /// Not enough samples for the requested estimator.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

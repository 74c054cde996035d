use thiserror::Error;

/// Errors raised by the physics pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unsupported configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed to converge or lost accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The request exceeds what the implementation can handle.
    #[error("capability error: {0}")]
    Capability(String),

    /// A perturbative energy denominator vanished.
    #[error("singular energy denominator at {state}: {detail}")]
    Singularity { state: String, detail: String },

    /// A root solve could not find a sign change.
    #[error("root not found: {0}")]
    RootNotFound(String),

    /// A perturbative validity condition does not hold.
    #[error("validity condition violated: {0}")]
    Validity(String),

    /// Gate calibration failed its structural checks.
    #[error("calibration error: {0}")]
    Calibration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

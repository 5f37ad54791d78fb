use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeraldError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested detection event has (numerically) zero probability,
    /// so no heralded state exists.
    #[error("zero-probability herald: two-photon detection rate G2 = {g2:e}")]
    ZeroProbabilityHerald { g2: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
}

pub type Result<T> = std::result::Result<T, HeraldError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(HeraldError::InvalidInput(msg.into()))
}

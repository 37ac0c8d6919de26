use thiserror::Error;

/// Errors raised when an input falls outside the domain of an operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("{what} = {value} is outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("ROC point (fpr={fpr}, tpr={tpr}) is not interior")]
    BoundaryPoint { fpr: f64, tpr: f64 },

    #[error("invalid cutoff grid: {0}")]
    InvalidGrid(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}

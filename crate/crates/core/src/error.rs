use thiserror::Error;

/// Errors raised by the integration library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("point {t} lies outside [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("functions are defined on different intervals")]
    IntervalMismatch,

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid division: {0}")]
    InvalidDivision(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot certify uniform error {requested:e}; best achievable is {best:e}")]
    ApproximationFailure { requested: f64, best: f64 },

    #[error("gauge too fine: {0}")]
    GaugeTooFine(String),

    #[error("cannot place a strictly interior tag in [{lo}, {hi}]")]
    TagPlacement { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

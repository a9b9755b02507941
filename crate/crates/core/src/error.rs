use thiserror::Error;

/// Errors raised by the analysis, simulation and model-building routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid phase-type distribution: {0}")]
    InvalidDistribution(String),

    #[error("transform evaluated at s = {s} is at or beyond the decay rate of the distribution")]
    DecayRateExceeded { s: f64 },

    #[error("hyperexponential fit failed: {0}")]
    Fit(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),

    #[error("unstable system: arrival rate {lambda} must lie in (0, 1)")]
    Instability { lambda: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{what} = {value} exceeds the supported cap {cap}")]
    Complexity { what: &'static str, value: usize, cap: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    Solver { what: &'static str, residual: f64 },

    #[error("query error: {0}")]
    Query(String),

    #[error("estimation error: {0}")]
    Estimation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlsError {
    /// An exponential kernel was asked to evaluate `e^s` with `s` above the
    /// guarded range.
    #[error("amplitude out of evaluable range: exponent argument {argument} exceeds {limit}")]
    Overflow { argument: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("mass touching boundary: fraction {outside:e} of the mass lies beyond r = {radius}")]
    MassTouchingBoundary { outside: f64, radius: f64 },

    #[error("virial radius {radius} too large for box half-width {half_width}")]
    RadiusTooLarge { radius: f64, half_width: f64 },

    #[error("integration failure at r = {r}: {reason}")]
    Integration { r: f64, reason: String },

    #[error("shooting bracket not found in [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("certificate failed: {name} = {value:e} exceeds tolerance {tolerance:e}")]
    CertificateFailed {
        name: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("kernel overflow along the scaling family at lambda = {lambda}: exponent argument {argument}")]
    ScalingOverflow { lambda: f64, argument: f64 },

    #[error("support violation at lambda = {lambda}: fraction {outside:e} of the mass lies beyond L/2")]
    SupportViolation { lambda: f64, outside: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inequality violated: {0}")]
    Inequality(String),

    #[error("resolution failure: {0}")]
    Resolution(String),

    #[error("malformed snapshot header: {0}")]
    MalformedHeader(String),

    #[error("truncated payload at byte {0}")]
    TruncatedPayload(usize),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NlsError {
    fn from(err: std::io::Error) -> Self {
        NlsError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NlsError>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin label: {0}")]
    InvalidLabel(String),

    #[error("endpoint divergence: exponent {exponent} evaluated at a zero base (theta = {theta})")]
    EndpointDivergence { exponent: f64, theta: f64 },

    #[error("expression contains the free symbol n and cannot be evaluated numerically")]
    Symbolic,

    #[error("integrand has non-integer half-angle exponents; use the analytic expectation path")]
    AnalyticPathRequired,

    #[error("singular coefficient: {0}")]
    SingularCoefficient(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("quadrature missed tolerance {tolerance:e}: error estimate {estimate:e} (value {value})")]
    Accuracy { value: f64, estimate: f64, tolerance: f64 },

    #[error("particle not in table: {0}")]
    UnknownParticle(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolvent is singular at {0}")]
    SingularResolvent(Complex64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("point {0} lies outside the admissible domain: {1}")]
    OutsideDomain(Complex64, &'static str),
    #[error("not in the domain of the model operator: {0}")]
    DomainViolation(String),
    #[error("realization is not conservative (max residual {0:e})")]
    NotConservative(f64),
    #[error("pole of order three or higher at {0} is not representable")]
    UnsupportedPole(Complex64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

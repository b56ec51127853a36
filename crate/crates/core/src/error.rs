use thiserror::Error;

/// Errors surfaced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension n must be at least 3 (got {0})")]
    Dimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree k = {k} out of range: {reason}")]
    Degree { k: usize, reason: &'static str },
    #[error("index i = {i} out of range for n = {n}")]
    Index { n: usize, i: usize },
    #[error("parameter j = {j} out of range for n = {n}")]
    BergIndex { n: usize, j: usize },
    #[error("interval is empty or inverted")]
    EmptyInterval,
    #[error("derivative data unavailable for {0}")]
    NotDifferentiable(String),
    #[error("pole or band atoms cannot be differentiated")]
    AtomDerivative,
    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),
    #[error("quadrature identity check failed (residual {0:e})")]
    QuadratureIdentity(f64),
    #[error("profile is not a support function: {0}")]
    InvalidBody(String),
    #[error("unknown body '{0}'")]
    UnknownBody(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        Err(Error::Dimension(n))
    } else {
        Ok(())
    }
}

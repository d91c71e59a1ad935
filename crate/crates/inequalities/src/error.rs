use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InequalityError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("quadrature did not converge: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, InequalityError>;

use loggas_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, SamplerError>;

use loggas_model::ModelError;
use loggas_samplers::SamplerError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration failure at t = {time}: {reason}")]
    Integration { time: f64, reason: String },
    #[error("singular kernel: {0}")]
    SingularKernel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

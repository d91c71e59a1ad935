use loggas_dynamics::DynamicsError;
use loggas_samplers::SamplerError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParabolicError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("propagation failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

pub type Result<T> = std::result::Result<T, ParabolicError>;

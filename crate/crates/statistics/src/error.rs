use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("fit range too thin: {0}")]
    RangeShrink(String),
    #[error(transparent)]
    Equilibrium(#[from] loggas_equilibrium::EquilibriumError),
}

pub type Result<T> = std::result::Result<T, StatsError>;

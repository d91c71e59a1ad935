use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} task(s) failed ({first_error}); {} artifact(s) salvaged", salvaged.len())]
    Partial { failed: usize, first_error: String, salvaged: Vec<String> },
    #[error("replay diverged in {}", divergent.join(", "))]
    Reproducibility { divergent: Vec<String> },
    #[error("{0}")]
    Module(String),
}

impl HarnessError {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { path: path.into(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

macro_rules! module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for HarnessError {
            fn from(e: $t) -> Self {
                Self::Module(e.to_string())
            }
        }
    )*};
}

module_error!(
    loggas_model::ModelError,
    loggas_equilibrium::EquilibriumError,
    loggas_samplers::SamplerError,
    loggas_dynamics::DynamicsError,
    loggas_parabolic::ParabolicError,
    loggas_inequalities::InequalityError,
    loggas_statistics::StatsError,
    serde_json::Error
);

pub type Result<T> = std::result::Result<T, HarnessError>;

//! Samplers for the measures of log-gas theory: Gaussian β-ensembles via
//! tridiagonal matrices, generalized Wigner matrices, and Metropolis-adjusted
//! Langevin chains for global, conditioned, interpolating and regularized
//! log-gases.

mod error;
mod mala;
mod measure;
mod tridiagonal;
mod wigner;

pub use error::{Result, SamplerError};
pub use mala::{
    mala_transition_density, run_chains, sample_log_gas_mcmc, ChainDiagnostics, ChainOutput, ChainParams, MalaChain,
};
pub use measure::{LogGasMeasure, OneBody};
pub use tridiagonal::{sample_gaussian_beta_tridiagonal, tridiagonal_eigenvalues};
pub use wigner::{sample_generalized_wigner, EntryLaw, Symmetry, VarianceProfile};

/// Regularized logarithm log_ε and its second derivative.
pub fn regularized_log(x: f64, epsilon: f64) -> (f64, f64) {
    let (v, _, d2) = loggas_model::log_eps(x, epsilon);
    (v, d2)
}

/// Default regularization scale ε = K^{−8}.
pub fn default_epsilon(k_half: usize) -> f64 {
    (k_half.max(1) as f64).powi(-8)
}

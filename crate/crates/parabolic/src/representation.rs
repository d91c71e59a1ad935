use loggas_dynamics::{build_hessian_kernel, integrate_dbm, DbmParams, DbmPath};
use loggas_model::{stream_rng, ParticleConfiguration};
use loggas_samplers::{sample_log_gas_mcmc, ChainParams, LogGasMeasure};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};
use crate::propagate::{propagate_many, PropagateParams, Scheme};

/// Differentiable function of the window positions.
pub trait Observable: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// Σ_j c_j x_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearObservable {
    pub weights: Vec<f64>,
}

impl Observable for LinearObservable {
    fn value(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.weights);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepresentationParams {
    pub paths: usize,
    /// A in T_max = A·τ·ln 𝒦.
    pub horizon_factor: f64,
    /// Fixed horizon in place of A·τ·ln 𝒦.
    pub horizon: Option<f64>,
    pub dbm: DbmParams,
    /// Each path starts from the last state of its own chain.
    pub chain: ChainParams,
}

impl Default for RepresentationParams {
    fn default() -> Self {
        Self {
            paths: 200,
            horizon_factor: 4.0,
            horizon: None,
            dbm: DbmParams { dt: 0.01, store_every: 0.1, ..Default::default() },
            chain: ChainParams { burn_in: 2000, samples: 1, thin: 1, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    /// ½∫_0^T E[∇G(x(S))·w(S)] dS.
    pub estimate: f64,
    pub std_error: f64,
    /// E F·G − E F(x(0))G(x(T)) on the same paths.
    pub direct: f64,
    pub direct_std_error: f64,
    pub horizon: f64,
    /// 1/λ_min(∇²E) over the starting states.
    pub tau: f64,
    pub paths: usize,
}

impl CorrelationEstimate {
    pub fn combined_std_error(&self) -> f64 {
        self.std_error.hypot(self.direct_std_error)
    }
}

/// Per-path contributions for one (F, G) pair.
struct PathTerms {
    integral: f64,
    same_time: f64,
    lagged: f64,
}

fn smallest_hessian_eigenvalue(measure: &LogGasMeasure, x: &ParticleConfiguration) -> Result<f64> {
    let single = DbmPath::from_states(vec![0.0], vec![x.clone()], measure.clone())?;
    let kernel = build_hessian_kernel(&single)?;
    Ok(kernel.frame(0).smallest_eigenvalue() / measure.beta())
}

fn mean_and_error(x: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = x.clone().count() as f64;
    let mean = x.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    let var = x.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Covariances ⟨F; G⟩ for several pairs on shared Langevin paths.
///
/// Each path starts from an independent chain sample x(0) of `measure`,
/// follows dx = dB − (β/2)∇E dt, and carries w(S) with w' = −½𝒜(S)w,
/// w(0) = ∇F(x(0)). Then ⟨F; G⟩ = ½∫_0^∞ E[∇G(x(S))·w(S)] dS, truncated at
/// T = A·τ·ln 𝒦 where τ⁻¹ is the smallest Hessian eigenvalue seen at the
/// starting states. The direct side E FG − E F(x(0))G(x(T)) is returned
/// with it.
pub fn correlations_via_representation(
    measure: &LogGasMeasure,
    initial: &[f64],
    pairs: &[(&dyn Observable, &dyn Observable)],
    params: &RepresentationParams,
    seed: u64,
) -> Result<Vec<CorrelationEstimate>> {
    if params.paths < 2 {
        return Err(ParabolicError::Domain("need at least two paths".into()));
    }
    let n = measure.len();
    let starts: Vec<ParticleConfiguration> = (0..params.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, 2 * i as u64);
            let out = sample_log_gas_mcmc(measure, initial.to_vec(), &params.chain, &mut rng)?;
            Ok(out.samples.into_iter().last().expect("one sample requested"))
        })
        .collect::<Result<_>>()?;
    let lambda = starts
        .par_iter()
        .map(|x| smallest_hessian_eigenvalue(measure, x))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(lambda > 0.0) {
        return Err(ParabolicError::Precondition(format!(
            "Hessian not positive definite at a starting state (λ_min = {lambda:e})"
        )));
    }
    let tau = 1.0 / lambda;
    let horizon = params.horizon.unwrap_or(params.horizon_factor * tau * (n as f64).ln());
    if !(horizon >= 0.0) {
        return Err(ParabolicError::Domain(format!("horizon {horizon} must be nonnegative")));
    }
    let propagation = PropagateParams {
        scheme: Scheme::Exponential,
        dt: params.dbm.store_every * (1.0 + 1e-9),
        rate: 0.5,
        ..Default::default()
    };

    let per_path: Vec<Vec<PathTerms>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let mut rng = stream_rng(seed, 2 * i as u64 + 1);
            let path = integrate_dbm(x0, measure, horizon, &params.dbm, &mut rng)?;
            let kernel = build_hessian_kernel(&path)?;
            let x_end = path.final_state().positions();
            let x_start = x0.positions();
            let gradients: Vec<Vec<f64>> = pairs
                .iter()
                .map(|(f, _)| {
                    let mut grad = vec![0.0; n];
                    f.gradient(x_start, &mut grad);
                    grad
                })
                .collect();
            let solutions = if horizon > 0.0 {
                propagate_many(&kernel, &gradients, 0.0, path.times()[path.len() - 1], &propagation)?
            } else {
                Vec::new()
            };
            let mut grad_g = vec![0.0; n];
            pairs
                .iter()
                .enumerate()
                .map(|(p, (f, g))| {
                    let f0 = f.value(x_start);
                    let same_time = f0 * g.value(x_start);
                    let lagged = f0 * g.value(x_end);
                    if horizon == 0.0 {
                        return Ok(PathTerms { integral: 0.0, same_time, lagged });
                    }
                    let sol = &solutions[p];
                    let integrand = path
                        .times()
                        .iter()
                        .zip(path.states())
                        .map(|(t, x)| {
                            g.gradient(x.positions(), &mut grad_g);
                            let w = sol.at(*t)?;
                            Ok(grad_g.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>())
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    let integral = 0.5
                        * path
                            .times()
                            .windows(2)
                            .zip(integrand.windows(2))
                            .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
                            .sum::<f64>();
                    Ok(PathTerms { integral, same_time, lagged })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok((0..pairs.len())
        .map(|p| {
            let (estimate, std_error) = mean_and_error(per_path.iter().map(|t| t[p].integral));
            let (direct, direct_std_error) = mean_and_error(per_path.iter().map(|t| t[p].same_time - t[p].lagged));
            CorrelationEstimate { estimate, std_error, direct, direct_std_error, horizon, tau, paths: params.paths }
        })
        .collect())
}

pub fn correlation_via_representation(
    measure: &LogGasMeasure,
    initial: &[f64],
    f: &dyn Observable,
    g: &dyn Observable,
    params: &RepresentationParams,
    seed: u64,
) -> Result<CorrelationEstimate> {
    Ok(correlations_via_representation(measure, initial, &[(f, g)], params, seed)?.remove(0))
}

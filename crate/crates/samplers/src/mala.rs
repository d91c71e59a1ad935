use loggas_model::{ParticleConfiguration, StreamRng};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SamplerError};
use crate::measure::LogGasMeasure;

/// Chain settings. `step` is the initial Langevin time step h; it is tuned
/// during burn-in toward `target_acceptance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub step: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub samples: usize,
    pub target_acceptance: f64,
    pub adapt: bool,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self { step: 1e-3, burn_in: 2000, thin: 10, samples: 1000, target_acceptance: 0.574, adapt: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub acceptance_rate: f64,
    pub step: f64,
    pub proposals: u64,
    pub accepted: u64,
    /// Fraction of adjacent label pairs found inverted before sorting
    /// (regularized measures only).
    pub inversion_fraction: f64,
    pub warnings: Vec<String>,
}

/// Metropolis-adjusted Langevin chain targeting exp(−β E).
pub struct MalaChain<'a> {
    measure: &'a LogGasMeasure,
    state: Vec<f64>,
    grad: Vec<f64>,
    energy: f64,
    step: f64,
    proposal: Vec<f64>,
    proposal_grad: Vec<f64>,
    proposals: u64,
    accepted: u64,
    inverted_pairs: u64,
    checked_pairs: u64,
}

impl<'a> MalaChain<'a> {
    pub fn new(measure: &'a LogGasMeasure, initial: Vec<f64>, step: f64) -> Result<Self> {
        if !measure.admissible(&initial) {
            return Err(SamplerError::Domain("initial state outside the support of the measure".into()));
        }
        if !(step > 0.0) {
            return Err(SamplerError::Domain(format!("step {step} must be positive")));
        }
        let n = initial.len();
        let mut grad = vec![0.0; n];
        let energy = measure.energy_and_gradient(&initial, &mut grad);
        Ok(Self {
            measure,
            state: initial,
            grad,
            energy,
            step,
            proposal: vec![0.0; n],
            proposal_grad: vec![0.0; n],
            proposals: 0,
            accepted: 0,
            inverted_pairs: 0,
            checked_pairs: 0,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn set_step_size(&mut self, step: f64) {
        self.step = step;
    }

    /// One MALA transition; returns whether it was accepted.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let beta = self.measure.beta();
        let h = self.step;
        let sd = h.sqrt();
        for i in 0..self.state.len() {
            let z: f64 = StandardNormal.sample(rng);
            self.proposal[i] = self.state[i] - 0.5 * h * beta * self.grad[i] + sd * z;
        }
        self.proposals += 1;
        if !self.measure.admissible(&self.proposal) {
            return false;
        }
        let e_new = self.measure.energy_and_gradient(&self.proposal, &mut self.proposal_grad);
        if !e_new.is_finite() {
            return false;
        }
        let log_accept = log_acceptance(beta, h, &self.state, self.energy, &self.grad, &self.proposal, e_new, &self.proposal_grad);
        if log_accept >= 0.0 || rng.random::<f64>().ln() < log_accept {
            std::mem::swap(&mut self.state, &mut self.proposal);
            std::mem::swap(&mut self.grad, &mut self.proposal_grad);
            self.energy = e_new;
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    /// Burn in, adapting the step toward the target acceptance when asked.
    pub fn burn_in<R: Rng + ?Sized>(&mut self, params: &ChainParams, rng: &mut R) {
        let block = 50;
        let mut done = 0;
        while done < params.burn_in {
            let len = block.min(params.burn_in - done);
            let mut acc = 0;
            for _ in 0..len {
                acc += self.step(rng) as usize;
            }
            done += len;
            if params.adapt {
                let rate = acc as f64 / len as f64;
                let gain = 2.0 / (1.0 + (done / block) as f64).sqrt();
                self.step *= (gain * (rate - params.target_acceptance)).exp();
            }
        }
        self.proposals = 0;
        self.accepted = 0;
    }

    /// Advance `thin` transitions and return the sorted state.
    pub fn next_sample<R: Rng + ?Sized>(&mut self, thin: usize, rng: &mut R) -> Result<ParticleConfiguration> {
        for _ in 0..thin.max(1) {
            self.step(rng);
        }
        let pairs = self.state.len().saturating_sub(1) as u64;
        self.checked_pairs += pairs;
        self.inverted_pairs += self.state.windows(2).filter(|w| w[1] < w[0]).count() as u64;
        ParticleConfiguration::from_unsorted(self.state.clone(), self.measure.window(), self.measure.scaling())
            .map_err(SamplerError::from)
    }

    pub fn diagnostics(&self) -> ChainDiagnostics {
        let acceptance_rate = if self.proposals == 0 { 0.0 } else { self.accepted as f64 / self.proposals as f64 };
        let mut warnings = Vec::new();
        if self.proposals > 0 && acceptance_rate < 0.01 {
            warnings.push(format!("acceptance rate {acceptance_rate:.4} below 1% after tuning"));
        }
        ChainDiagnostics {
            acceptance_rate,
            step: self.step,
            proposals: self.proposals,
            accepted: self.accepted,
            inversion_fraction: if self.checked_pairs == 0 {
                0.0
            } else {
                self.inverted_pairs as f64 / self.checked_pairs as f64
            },
            warnings,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn log_acceptance(beta: f64, h: f64, x: &[f64], ex: f64, gx: &[f64], y: &[f64], ey: f64, gy: &[f64]) -> f64 {
    // log q(x|y) − log q(y|x) with q(b|a) ∝ exp(−|b − a + (h/2)β∇E(a)|²/(2h)).
    let mut fwd = 0.0;
    let mut bwd = 0.0;
    for i in 0..x.len() {
        let f = y[i] - x[i] + 0.5 * h * beta * gx[i];
        let b = x[i] - y[i] + 0.5 * h * beta * gy[i];
        fwd += f * f;
        bwd += b * b;
    }
    -beta * (ey - ex) + (fwd - bwd) / (2.0 * h)
}

/// Density of the MALA transition x → y (y ≠ x) with step h: q(y|x)·α(x, y).
pub fn mala_transition_density(measure: &LogGasMeasure, h: f64, x: &[f64], y: &[f64]) -> f64 {
    if !measure.admissible(x) || !measure.admissible(y) {
        return 0.0;
    }
    let beta = measure.beta();
    let n = x.len();
    let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
    let ex = measure.energy_and_gradient(x, &mut gx);
    let ey = measure.energy_and_gradient(y, &mut gy);
    let mut fwd = 0.0;
    for i in 0..n {
        let f = y[i] - x[i] + 0.5 * h * beta * gx[i];
        fwd += f * f;
    }
    let q = (-fwd / (2.0 * h)).exp() / (2.0 * std::f64::consts::PI * h).powf(0.5 * n as f64);
    let a = log_acceptance(beta, h, x, ex, &gx, y, ey, &gy).min(0.0).exp();
    q * a
}

/// Output of one chain.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub samples: Vec<ParticleConfiguration>,
    pub diagnostics: ChainDiagnostics,
}

/// Burn in, then collect `params.samples` thinned samples.
pub fn sample_log_gas_mcmc<R: Rng + ?Sized>(
    measure: &LogGasMeasure,
    initial: Vec<f64>,
    params: &ChainParams,
    rng: &mut R,
) -> Result<ChainOutput> {
    let mut chain = MalaChain::new(measure, initial, params.step)?;
    chain.burn_in(params, rng);
    let samples = (0..params.samples).map(|_| chain.next_sample(params.thin, rng)).collect::<Result<Vec<_>>>()?;
    Ok(ChainOutput { samples, diagnostics: chain.diagnostics() })
}

/// Independent chains in parallel; chain `c` uses stream `c` of `seed`.
pub fn run_chains(
    measure: &LogGasMeasure,
    initial: &[f64],
    params: &ChainParams,
    seed: u64,
    chains: usize,
) -> Result<Vec<ChainOutput>> {
    (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng: StreamRng = loggas_model::stream_rng(seed, c as u64);
            sample_log_gas_mcmc(measure, initial.to_vec(), params, &mut rng)
        })
        .collect()
}

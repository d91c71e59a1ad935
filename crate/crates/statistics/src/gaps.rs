use loggas_equilibrium::EquilibriumDensity;
use loggas_model::{IndexWindow, ParticleConfiguration, Scaling};
use serde::{Deserialize, Serialize};

use crate::cdf::EmpiricalCdf;
use crate::error::{Result, StatsError};

/// Indices k with αN ≤ k ≤ (1 − α)N count as bulk.
pub const BULK_FRACTION: f64 = 0.1;

/// Name and inverse temperature of the ensemble a sample was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub name: String,
    pub beta: f64,
}

impl Ensemble {
    pub fn new(name: impl Into<String>, beta: f64) -> Self {
        Self { name: name.into(), beta }
    }
}

/// Rescaled gaps (Nϱ_k)(x_{k+a} − x_k), a = 1..n, one row per draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub ensemble: Ensemble,
    pub k: usize,
    pub n_total: usize,
    /// ϱ(γ_k).
    pub rho_k: f64,
    pub gaps: Vec<Vec<f64>>,
}

impl GapSample {
    pub fn draws(&self) -> usize {
        self.gaps.len()
    }

    /// The a-th order gaps of every draw that has one.
    pub fn order(&self, a: usize) -> Vec<f64> {
        self.gaps.iter().filter_map(|row| a.checked_sub(1).and_then(|i| row.get(i)).copied()).collect()
    }

    pub fn cdf(&self, a: usize) -> Result<EmpiricalCdf> {
        EmpiricalCdf::new(self.order(a))
    }

    pub fn mean(&self, a: usize) -> f64 {
        let g = self.order(a);
        g.iter().sum::<f64>() / g.len().max(1) as f64
    }
}

fn check_bulk(k: usize, n_total: usize) -> Result<()> {
    let lo = (BULK_FRACTION * n_total as f64).ceil() as usize;
    let hi = ((1.0 - BULK_FRACTION) * n_total as f64).floor() as usize;
    if k < lo.max(1) || k > hi {
        return Err(StatsError::Domain(format!("index {k} outside the bulk [{lo}, {hi}] of N = {n_total}")));
    }
    Ok(())
}

/// Rescaled gaps at label k (1-based) of full N-particle configurations,
/// together with the empirical CDF of all of them pooled.
pub fn gap_distribution(
    samples: &[ParticleConfiguration],
    density: &EquilibriumDensity,
    ensemble: Ensemble,
    k: usize,
    n: usize,
) -> Result<(GapSample, EmpiricalCdf)> {
    let first = samples.first().ok_or_else(|| StatsError::InsufficientData("no configurations".into()))?;
    let n_total = first.len();
    if n == 0 {
        return Err(StatsError::Domain("gap order must be at least 1".into()));
    }
    check_bulk(k, n_total)?;
    let rho_k = density.density_at_quantile(k, n_total)?;
    let mut gaps = Vec::with_capacity(samples.len());
    for s in samples {
        if s.window() != IndexWindow::full(n_total) || s.len() != n_total {
            return Err(StatsError::Domain("all configurations must be full systems of the same size".into()));
        }
        let factor = match s.scaling() {
            Scaling::Macroscopic => n_total as f64 * rho_k,
            Scaling::Microscopic => rho_k,
        };
        let x = s.positions();
        let top = n.min(n_total - k);
        gaps.push((1..=top).map(|a| factor * (x[k - 1 + a] - x[k - 1])).collect::<Vec<_>>());
    }
    let pooled = EmpiricalCdf::new(gaps.iter().flatten().copied().collect())?;
    Ok((GapSample { ensemble, k, n_total, rho_k, gaps }, pooled))
}

use loggas_model::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdf::{ks_sorted, EmpiricalCdf};
use crate::error::{Result, StatsError};
use crate::gaps::GapSample;

/// Samples smaller than this are refused by [`universality_compare`].
pub const MIN_COMPARISON_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapParams {
    pub resamples: usize,
    pub level: f64,
}

impl Default for BootstrapParams {
    fn default() -> Self {
        Self { resamples: 400, level: 0.95 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsComparison {
    pub ks: f64,
    /// Basic bootstrap interval (2D − q_hi, 2D − q_lo), clamped at 0.
    pub ci: (f64, f64),
    /// Upper `level` quantile of the distance when both samples are redrawn
    /// from their pooled sample; distances below it are indistinguishable
    /// from zero.
    pub null_critical: f64,
    pub sizes: (usize, usize),
    pub resamples: usize,
    pub level: f64,
}

impl KsComparison {
    pub fn consistent_with_zero(&self) -> bool {
        self.ci.0 == 0.0 || self.ks <= self.null_critical
    }
}

fn resample<R: Rng>(source: &[f64], count: usize, rng: &mut R) -> Vec<f64> {
    let mut out: Vec<f64> = (0..count).map(|_| source[rng.random_range(0..source.len())]).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn upper_quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// KS distance of two samples with bootstrap intervals. Resample r uses
/// streams 2r and 2r + 1 of `seed`.
pub fn ks_bootstrap(a: &EmpiricalCdf, b: &EmpiricalCdf, params: &BootstrapParams, seed: u64) -> Result<KsComparison> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::InsufficientData("empty sample".into()));
    }
    if params.resamples < 2 || !(params.level > 0.0 && params.level < 1.0) {
        return Err(StatsError::Domain("need at least two resamples and a level in (0, 1)".into()));
    }
    let ks = ks_sorted(a.sorted(), b.sorted());
    let pooled: Vec<f64> = a.sorted().iter().chain(b.sorted()).copied().collect();
    let (mut direct, mut null): (Vec<f64>, Vec<f64>) = (0..params.resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, 2 * r as u64);
            let d = ks_sorted(&resample(a.sorted(), a.len(), &mut rng), &resample(b.sorted(), b.len(), &mut rng));
            let mut rng = stream_rng(seed, 2 * r as u64 + 1);
            let null = ks_sorted(&resample(&pooled, a.len(), &mut rng), &resample(&pooled, b.len(), &mut rng));
            (d, null)
        })
        .unzip();
    direct.sort_by(f64::total_cmp);
    null.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - params.level);
    let lo = upper_quantile(&direct, tail);
    let hi = upper_quantile(&direct, 1.0 - tail);
    Ok(KsComparison {
        ks,
        ci: ((2.0 * ks - hi).max(0.0), (2.0 * ks - lo).max(0.0)),
        null_critical: upper_quantile(&null, params.level),
        sizes: (a.len(), b.len()),
        resamples: params.resamples,
        level: params.level,
    })
}

/// Compare the order-`n` gap laws of two samples.
pub fn universality_compare(
    a: &GapSample,
    b: &GapSample,
    n: usize,
    params: &BootstrapParams,
    seed: u64,
) -> Result<KsComparison> {
    if (a.ensemble.beta - b.ensemble.beta).abs() > 1e-12 {
        return Err(StatsError::Domain(format!(
            "β differs: {} against {}",
            a.ensemble.beta, b.ensemble.beta
        )));
    }
    let (fa, fb) = (a.cdf(n)?, b.cdf(n)?);
    if fa.len() < MIN_COMPARISON_SAMPLES || fb.len() < MIN_COMPARISON_SAMPLES {
        return Err(StatsError::InsufficientData(format!(
            "{} and {} gaps; at least {MIN_COMPARISON_SAMPLES} each are needed",
            fa.len(),
            fb.len()
        )));
    }
    ks_bootstrap(&fa, &fb, params, seed)
}

use loggas_dynamics::HessianKernel;
use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};
use crate::propagate::{propagate_delta, PropagateParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpeedParams {
    /// Short-range cut ℓ: the short-range operator keeps |j − k| ≤ ℓ.
    pub ell: usize,
    /// Regularity exponent ρ₁ entering the default scale.
    pub rho1: f64,
    /// Exponential scale; defaults to ℓ·K^{(ρ₁+1)/2}·√(s + 1).
    pub theta: Option<f64>,
    /// Smallest |p − b| used to fit the 1/|p − b| envelope.
    pub envelope_from: usize,
}

impl Default for FiniteSpeedParams {
    fn default() -> Self {
        Self { ell: 1, rho1: 0.0, theta: None, envelope_from: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpeedReport {
    pub source: usize,
    pub s: f64,
    pub theta: f64,
    /// |r_j(s)| for the short-range evolution.
    pub short_range: Vec<f64>,
    /// |v_j(s)| for the full evolution.
    pub full: Vec<f64>,
    /// Least-squares slope of ln r_j against |j − b| over positive entries.
    pub log_slope: f64,
    /// max_j r_j·exp(|j − b|/θ): the constant the exponential bound needs.
    pub exponential_constant: f64,
    /// max over |p − b| ≥ envelope_from of |v_p|·|p − b|/√(s + 1).
    pub envelope_constant: f64,
}

/// Evolves the delta at offset `b` for time `s` from the kernel's first time,
/// once with the full kernel and once with its short-range part, and
/// measures the off-source decay of both.
pub fn finite_speed_profile(
    kernel: &HessianKernel,
    b: usize,
    s: f64,
    params: &FiniteSpeedParams,
    propagation: &PropagateParams,
) -> Result<FiniteSpeedReport> {
    if params.ell == 0 {
        return Err(ParabolicError::Domain("short-range cut must be at least 1".into()));
    }
    let n = kernel.n();
    let k_half = ((n - 1) / 2).max(1) as f64;
    let theta = params.theta.unwrap_or(params.ell as f64 * k_half.powf(0.5 * (params.rho1 + 1.0)) * (s + 1.0).sqrt());
    let t0 = kernel.times()[0];
    let short_params = PropagateParams { band: Some(params.ell), ..*propagation };
    let full_params = PropagateParams { band: None, ..*propagation };
    let short_range: Vec<f64> =
        propagate_delta(kernel, b, t0, t0 + s, &short_params)?.final_values().iter().map(|x| x.abs()).collect();
    let full: Vec<f64> =
        propagate_delta(kernel, b, t0, t0 + s, &full_params)?.final_values().iter().map(|x| x.abs()).collect();

    let dist = |j: usize| j.abs_diff(b) as f64;
    let exponential_constant = short_range.iter().enumerate().map(|(j, r)| r * (dist(j) / theta).exp()).fold(0.0, f64::max);
    // Entries below ~1e-280 are dominated by rounding.
    let points: Vec<(f64, f64)> = short_range
        .iter()
        .enumerate()
        .filter(|&(j, &r)| j != b && r > 1e-280)
        .map(|(j, &r)| (dist(j), r.ln()))
        .collect();
    let log_slope = least_squares_slope(&points);
    let envelope_constant = full
        .iter()
        .enumerate()
        .filter(|&(p, _)| p.abs_diff(b) >= params.envelope_from.max(1))
        .map(|(p, v)| v * dist(p) / (s + 1.0).sqrt())
        .fold(0.0, f64::max);
    Ok(FiniteSpeedReport { source: b, s, theta, short_range, full, log_slope, exponential_constant, envelope_constant })
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

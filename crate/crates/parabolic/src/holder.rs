use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};
use crate::finite_speed::least_squares_slope;
use crate::propagate::PropagatorSolution;

/// max − min of v_j(σ) over |j − Z| ≤ σ^{1−α}, where σ is the time since the
/// start of the solution and Z a window offset.
pub fn holder_oscillation(solution: &PropagatorSolution, z: usize, sigma: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0 / 3.0).contains(&alpha) {
        return Err(ParabolicError::Domain(format!("α = {alpha} outside [0, 1/3]")));
    }
    if !(sigma > 0.0) {
        return Err(ParabolicError::Domain(format!("σ = {sigma} must be positive")));
    }
    // The tolerance keeps σ = r^{1/(1−α)} from losing a site to rounding.
    let radius = (sigma.powf(1.0 - alpha) + 1e-9).floor() as usize;
    let n = solution.window().len();
    if radius > z || z + radius >= n {
        return Err(ParabolicError::Domain(format!(
            "window of radius {radius} around offset {z} leaves the index range 0..{n}"
        )));
    }
    let v = solution.at(solution.start() + sigma)?;
    let slice = &v[z - radius..=z + radius];
    let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// Slope of ln(σ·osc) against ln σ.
    pub slope: f64,
    /// Effective exponent 𝔮 from σ·osc ~ σ^{−𝔮α/2}.
    pub exponent: f64,
}

/// Regression of ln(σ·osc) on ln σ.
pub fn fit_holder_exponent(sigmas: &[f64], oscillations: &[f64], alpha: f64) -> Result<HolderFit> {
    if sigmas.len() != oscillations.len() || sigmas.len() < 2 {
        return Err(ParabolicError::Domain("need at least two (σ, osc) pairs".into()));
    }
    if !(alpha > 0.0) {
        return Err(ParabolicError::Domain(format!("α = {alpha} must be positive for the fit")));
    }
    let points: Vec<(f64, f64)> = sigmas
        .iter()
        .zip(oscillations)
        .filter(|(_, &o)| o > 0.0)
        .map(|(&s, &o)| (s.ln(), (s * o).ln()))
        .collect();
    let slope = least_squares_slope(&points);
    Ok(HolderFit { slope, exponent: -2.0 * slope / alpha })
}

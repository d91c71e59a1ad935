use serde::{Deserialize, Serialize};

use crate::boundary::{external_potential, BoundaryData};
use crate::configuration::Scaling;
use crate::error::{ModelError, Result};
use crate::potential::PotentialModel;

/// Tolerance constants for the three regularity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityTolerances {
    /// `||J| − 𝒦/(Nϱ)| ≤ length · K^ξ/N`.
    pub length: f64,
    /// `|V_y' − profile| ≤ profile · ϱ K^ξ/(N d)`.
    pub profile: f64,
    /// `(V_y'' − inf V'') · d ≥ convexity`.
    pub convexity: f64,
}

impl Default for RegularityTolerances {
    fn default() -> Self {
        Self { length: 10.0, profile: 10.0, convexity: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub interval_length_ok: bool,
    pub derivative_profile_ok: bool,
    pub convexity_ok: bool,
    /// `||J| − 𝒦/(Nϱ)| · N/K^ξ`.
    pub length_residual: f64,
    /// Largest `|V_y' − profile| · N d/(ϱ K^ξ)` on the grid.
    pub max_profile_residual: f64,
    /// Point where the profile residual peaks.
    pub worst_profile_point: f64,
    /// Smallest `(V_y'' − inf V'') · d` on the grid.
    pub min_convexity: f64,
    pub grid_points: usize,
}

impl RegularityReport {
    pub fn all_ok(&self) -> bool {
        self.interval_length_ok && self.derivative_profile_ok && self.convexity_ok
    }
}

/// Signed logarithmic profile `2ϱ log((d_left + δ)/(d_right + δ))` with
/// offset `δ = K^ξ/(Nϱ)`.
pub fn derivative_profile(x: f64, interval: (f64, f64), rho_bar: f64, offset: f64) -> f64 {
    let (a, b) = interval;
    2.0 * rho_bar * ((x - a + offset) / (b - x + offset)).ln()
}

/// Evaluate the interval-length, derivative-profile and convexity
/// conditions of a macroscopic external potential on a grid over J.
/// `k_half` is the window half-width K, so 𝒦 = 2K + 1 particles live in J.
pub fn check_regular_potential(
    v: &PotentialModel,
    boundary: &BoundaryData,
    rho_bar: f64,
    xi: f64,
    k_half: usize,
    tolerances: RegularityTolerances,
    grid_points: usize,
) -> Result<RegularityReport> {
    if boundary.scaling() != Scaling::Macroscopic {
        return Err(ModelError::Contract("regularity check expects macroscopic boundary data".into()));
    }
    if !(rho_bar > 0.0) {
        return Err(ModelError::Domain(format!("local density {rho_bar} must be positive")));
    }
    let (a, b) = boundary.interval();
    if !a.is_finite() || !b.is_finite() {
        return Err(ModelError::Domain("regularity check needs external points on both sides".into()));
    }
    let n = boundary.n_total() as f64;
    let count = (2 * k_half + 1) as f64;
    let kxi = (k_half as f64).powf(xi);
    let len = b - a;
    let length_residual = (len - count / (n * rho_bar)).abs() * n / kxi;
    let offset = kxi / (n * rho_bar);
    let inf_v2 = v.inf_second_derivative();

    let grid_points = grid_points.max(16);
    let mut max_profile_residual: f64 = 0.0;
    let mut worst_profile_point = 0.5 * (a + b);
    let mut min_convexity = f64::INFINITY;
    for i in 0..grid_points {
        let x = a + len * (i as f64 + 0.5) / grid_points as f64;
        let d = (x - a).min(b - x);
        let vy = external_potential(v, boundary, x)?;
        let residual = (vy.first - derivative_profile(x, (a, b), rho_bar, offset)).abs() * n * d / (rho_bar * kxi);
        if residual > max_profile_residual {
            max_profile_residual = residual;
            worst_profile_point = x;
        }
        min_convexity = min_convexity.min((vy.second - inf_v2) * d);
    }
    Ok(RegularityReport {
        interval_length_ok: length_residual <= tolerances.length,
        derivative_profile_ok: max_profile_residual <= tolerances.profile,
        convexity_ok: min_convexity >= tolerances.convexity,
        length_residual,
        max_profile_residual,
        worst_profile_point,
        min_convexity,
        grid_points,
    })
}

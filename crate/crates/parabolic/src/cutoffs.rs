use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};

/// Cutoff vectors over window offsets for scale M, centre Z, height ℓ and
/// ratio λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffFamily {
    pub m: f64,
    pub z: usize,
    pub ell: f64,
    pub lambda: f64,
    pub psi: Vec<f64>,
    pub psi_tilde: Vec<f64>,
    pub f: Vec<f64>,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

/// ψ_i = ℓ(|(i − Z)/M|^{1/2} − 1)_+.
pub fn psi(n: usize, m: f64, z: usize, ell: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let r = i.abs_diff(z) as f64 / m;
            ell * (r.sqrt() - 1.0).max(0.0)
        })
        .collect()
}

pub fn build_cutoffs(n: usize, m: f64, z: usize, ell: f64, lambda: f64) -> Result<CutoffFamily> {
    if !(lambda > 0.0 && lambda < 0.1) {
        return Err(ParabolicError::Domain(format!("λ = {lambda} outside (0, 1/10)")));
    }
    if !(m >= 1.0) || !m.is_finite() {
        return Err(ParabolicError::Domain(format!("M = {m} must be at least 1")));
    }
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(ParabolicError::Domain(format!("ℓ = {ell} must be finite and nonnegative")));
    }
    let inner = lambda.powi(-4);
    let ratio = |i: usize| i.abs_diff(z) as f64 / m;
    let psi = psi(n, m, z, ell);
    let psi_tilde: Vec<f64> = (0..n)
        .map(|i| {
            let d = ratio(i) - inner;
            if d <= 0.0 {
                0.0
            } else {
                ell * (d.powf(0.25) - 1.0).max(0.0)
            }
        })
        .collect();
    let f: Vec<f64> = (0..n).map(|i| ell * (ratio(i).powi(2) - 81.0).min(0.0).max(-1.0)).collect();
    let phi = |c: f64| -> Vec<f64> { psi_tilde.iter().zip(&f).map(|(p, fi)| ell + p + c * fi).collect() };
    let (phi0, phi1, phi2) = (phi(1.0), phi(lambda), phi(lambda * lambda));
    Ok(CutoffFamily { m, z, ell, lambda, psi, psi_tilde, f, phi0, phi1, phi2 })
}

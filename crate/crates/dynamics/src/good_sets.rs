use serde::{Deserialize, Serialize};

use crate::averages::{dyadic_shifts, RadiusIntegrals};
use crate::dbm::DbmPath;
use crate::error::{DynamicsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodSetParams {
    /// Rigidity exponent: 𝒢 asks |x_j − α_j| ≤ K^{ξ′} mean spacings.
    pub xi_prime: f64,
    /// Gap exponent: Q asks the averaged inverse squared gaps ≤ K^ρ.
    pub rho: f64,
    /// Constant c in the range ⌊c·ln K⌋ of the dyadic shifts.
    pub shift_constant: f64,
}

impl Default for GoodSetParams {
    fn default() -> Self {
        Self { xi_prime: 0.3, rho: 0.5, shift_constant: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub sigma: f64,
    /// Window offset of the centre.
    pub z: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetReport {
    pub in_g: bool,
    /// sup over stored s and window labels of |x_j(s) − α_j|, in units of
    /// `rigidity_unit`.
    pub rigidity_sup: f64,
    /// Mean spacing of the reference points.
    pub rigidity_unit: f64,
    pub rigidity_threshold: f64,
    pub q_threshold: f64,
    /// Every (σ, Z) evaluated, including the shifted times and both ends.
    pub q_values: Vec<QValue>,
    /// Q at (σ, Z).
    pub in_q: bool,
    /// Q at (σ, Z), (σ, −K) and (σ, K).
    pub in_q_hat: bool,
    /// Q̂ at σ and at every σ + τ, τ ∈ Ξ, inside the path's time range.
    pub in_q_tilde: bool,
    /// Shifts dropped because σ + τ falls before the first stored time.
    pub skipped_shifts: usize,
}

/// Good-set indicators along a path of a window of 2K + 1 particles.
///
/// `alpha` holds the reference location of each window label. Gap i runs
/// from x_i to x_{i+1}; the last one uses the upper end of J in place of
/// x_{K+1}, and is left out when the measure is not conditioned. `z` is a
/// window offset.
pub fn evaluate_good_sets(
    path: &DbmPath,
    alpha: &[f64],
    sigma: f64,
    z: usize,
    params: &GoodSetParams,
) -> Result<GoodSetReport> {
    let n = path.measure().len();
    if alpha.len() != n {
        return Err(DynamicsError::Domain(format!("{} reference points for {n} particles", alpha.len())));
    }
    if z >= n {
        return Err(DynamicsError::Domain(format!("centre offset {z} outside the window")));
    }
    let times = path.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    if sigma < t0 || sigma > t1 {
        return Err(DynamicsError::Domain(format!("σ = {sigma} outside the path's range [{t0}, {t1}]")));
    }
    let k_half = (n - 1) / 2;
    let k = k_half.max(1) as f64;

    let rigidity_unit = if n > 1 { (alpha[n - 1] - alpha[0]) / (n - 1) as f64 } else { 1.0 };
    if !(rigidity_unit > 0.0) {
        return Err(DynamicsError::Domain("reference points must increase".into()));
    }
    let rigidity_sup = path
        .states()
        .iter()
        .flat_map(|s| s.positions().iter().zip(alpha).map(|(x, a)| (x - a).abs()))
        .fold(0.0, f64::max)
        / rigidity_unit;
    let rigidity_threshold = k.powf(params.xi_prime);

    let upper = path.measure().interval().map(|(_, b)| b);
    let gaps = if upper.is_some() { n } else { n - 1 };
    // prefix[t][i] = Σ_{i' < i} 1/gap_{i'}(t)²
    let prefix: Vec<Vec<f64>> = path
        .states()
        .iter()
        .map(|s| {
            let x = s.positions();
            let mut p = Vec::with_capacity(gaps + 1);
            p.push(0.0);
            let mut acc = 0.0;
            for i in 0..gaps {
                let next = if i + 1 < n { x[i + 1] } else { upper.unwrap() };
                let g = next - x[i];
                acc += 1.0 / (g * g);
                p.push(acc);
            }
            p
        })
        .collect();

    let q_threshold = k.powf(params.rho);
    let centres = [z, 0, n - 1];
    let integrals: Vec<RadiusIntegrals> = centres
        .iter()
        .map(|&c| {
            let averages: Vec<Vec<f64>> = prefix
                .iter()
                .map(|p| {
                    (1..=k_half.max(1))
                        .map(|m| {
                            let lo = c.saturating_sub(m);
                            let hi = (c + m).min(gaps - 1);
                            (p[hi + 1] - p[lo]) / m as f64
                        })
                        .collect()
                })
                .collect();
            RadiusIntegrals::new(times, &averages)
        })
        .collect();

    let mut sigmas = vec![sigma];
    let mut skipped = 0;
    for tau in dyadic_shifts(k_half, params.shift_constant) {
        if sigma + tau >= t0 {
            sigmas.push(sigma + tau);
        } else {
            skipped += 1;
        }
    }
    let mut q_values = Vec::new();
    let mut in_q = true;
    let mut in_q_hat = true;
    let mut in_q_tilde = true;
    for (si, &s) in sigmas.iter().enumerate() {
        for (ci, integral) in integrals.iter().enumerate() {
            let value = integral.sup(s);
            let ok = value <= q_threshold;
            if si == 0 {
                if ci == 0 {
                    in_q = ok;
                }
                in_q_hat &= ok;
            }
            in_q_tilde &= ok;
            q_values.push(QValue { sigma: s, z: centres[ci], value });
        }
    }
    Ok(GoodSetReport {
        in_g: rigidity_sup <= rigidity_threshold,
        rigidity_sup,
        rigidity_unit,
        rigidity_threshold,
        q_threshold,
        q_values,
        in_q,
        in_q_hat,
        in_q_tilde,
        skipped_shifts: skipped,
    })
}

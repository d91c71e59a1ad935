use crate::averages::{dyadic_shifts, RadiusIntegrals};
use crate::error::{DynamicsError, Result};
use crate::kernel::{HessianKernel, KernelFrame};

/// (1/M) Σ_{i ≠ j, |i−Z| ≤ M, |j−Z| ≤ M} B_ij for M = 1..=K.
fn window_averages(frame: &KernelFrame, z: usize, k_half: usize) -> Vec<f64> {
    let n = frame.n();
    let (mut lo, mut hi) = (z, z);
    let mut total = 0.0;
    let mut out = Vec::with_capacity(k_half);
    for m in 1..=k_half {
        if z >= m {
            lo = z - m;
            total += 2.0 * (lo + 1..=hi).map(|j| frame.b(lo, j)).sum::<f64>();
        }
        if z + m < n {
            hi = z + m;
            total += 2.0 * (lo..hi).map(|j| frame.b(hi, j)).sum::<f64>();
        }
        out.push(total / m as f64);
    }
    out
}

fn integrals(kernel: &HessianKernel, z: usize) -> Result<RadiusIntegrals<'_>> {
    let n = kernel.n();
    if z >= n {
        return Err(DynamicsError::Domain(format!("centre offset {z} outside the window")));
    }
    let k_half = ((n - 1) / 2).max(1);
    let averages: Vec<Vec<f64>> = if kernel.is_constant() {
        let a = window_averages(kernel.frame(0), z, k_half);
        vec![a; kernel.times().len()]
    } else {
        (0..kernel.times().len()).map(|i| window_averages(kernel.frame(i), z, k_half)).collect()
    };
    Ok(RadiusIntegrals::new(kernel.times(), &averages))
}

/// Attained value of sup_{s, 1≤M≤K} |∫_s^σ (1/M) ΣΣ B_ij(u) du| / (1 + |s − σ|),
/// the double sum running over window offsets within M of `z`. The caller
/// compares it with K^ρ.
pub fn check_regularity_point(kernel: &HessianKernel, z: usize, sigma: f64) -> Result<f64> {
    Ok(integrals(kernel, z)?.sup(sigma))
}

/// Largest regularity value over σ and σ + τ for the dyadic shifts τ that
/// stay inside the kernel's time range.
pub fn check_strong_regularity(kernel: &HessianKernel, z: usize, sigma: f64, shift_constant: f64) -> Result<f64> {
    let ints = integrals(kernel, z)?;
    let t0 = kernel.times()[0];
    let k_half = ((kernel.n() - 1) / 2).max(1);
    let mut best = ints.sup(sigma);
    for tau in dyadic_shifts(k_half, shift_constant) {
        if sigma + tau >= t0 {
            best = best.max(ints.sup(sigma + tau));
        }
    }
    Ok(best)
}

use loggas_model::{ParticleConfiguration, Scaling};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Result, SamplerError};

/// √(a² + b²), falling back to the scaled libm routine only when the plain
/// sum of squares would overflow or underflow.
#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    let s = a * a + b * b;
    if s.is_finite() && s > 1e-290 {
        s.sqrt()
    } else {
        a.hypot(b)
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub-diagonal `off` (length `diag.len() - 1`), by implicit QL iteration
/// with Wilkinson shifts. Returned in increasing order.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(SamplerError::Domain(format!("off-diagonal length {} for size {n}", off.len())));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 100 {
                return Err(SamplerError::Numeric("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of the Gaussian β-ensemble tridiagonal model: diagonal
/// N(0, 2)/√(Nβ), off-diagonal χ_{β(N−k)}/√(Nβ), k = 1..N−1. The empirical
/// density approaches the semicircle on [−2, 2].
pub fn sample_gaussian_beta_tridiagonal<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<ParticleConfiguration> {
    if n == 0 {
        return Err(SamplerError::Domain("N must be at least 1".into()));
    }
    if !(beta > 0.0) {
        return Err(SamplerError::Domain(format!("beta = {beta} must be positive")));
    }
    let scale = 1.0 / (n as f64 * beta).sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            std::f64::consts::SQRT_2 * z * scale
        })
        .collect();
    let mut off = Vec::with_capacity(n - 1);
    for k in 1..n {
        let chi2 = ChiSquared::new(beta * (n - k) as f64).map_err(|e| SamplerError::Domain(e.to_string()))?;
        off.push(chi2.sample(rng).sqrt() * scale);
    }
    let eig = tridiagonal_eigenvalues(&diag, &off)?;
    ParticleConfiguration::full(eig, Scaling::Macroscopic).map_err(SamplerError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_known_spectrum() {
        // Discrete Laplacian: eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 12;
        let eig = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, ev) in eig.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((ev - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn handles_zero_couplings() {
        let eig = tridiagonal_eigenvalues(&[3.0, 1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig, vec![1.0, 2.0, 3.0]);
    }
}

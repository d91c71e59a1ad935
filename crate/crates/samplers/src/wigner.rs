use loggas_model::{ParticleConfiguration, Scaling};
use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SamplerError};

/// Symmetric variance profile σ²_ij with unit column sums and two-sided
/// C_inf/N ≤ σ²_ij ≤ C_sup/N bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    sigma_squared: DMatrix<f64>,
}

impl VarianceProfile {
    pub fn new(sigma_squared: DMatrix<f64>, c_inf: f64, c_sup: f64) -> Result<Self> {
        let n = sigma_squared.nrows();
        if n == 0 || sigma_squared.ncols() != n {
            return Err(SamplerError::Construction("variance profile must be a non-empty square matrix".into()));
        }
        let nf = n as f64;
        for j in 0..n {
            let sum: f64 = sigma_squared.column(j).iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(SamplerError::Construction(format!("column {j} sums to {sum}, not 1")));
            }
            for i in 0..n {
                let s = sigma_squared[(i, j)];
                if s != sigma_squared[(j, i)] {
                    return Err(SamplerError::Construction(format!("profile not symmetric at ({i}, {j})")));
                }
                if s < c_inf / nf * (1.0 - 1e-12) || s > c_sup / nf * (1.0 + 1e-12) {
                    return Err(SamplerError::Construction(format!(
                        "σ²[{i},{j}] = {s} outside [{c_inf}/N, {c_sup}/N]"
                    )));
                }
            }
        }
        Ok(Self { sigma_squared })
    }

    /// σ²_ij = 1/N.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(DMatrix::from_element(n, n, 1.0 / n as f64), 1.0, 1.0)
    }

    /// σ²_ij = (c_inf + b·1{circular distance ≤ half_band})/N with b chosen
    /// for unit column sums.
    pub fn circular_band(n: usize, half_band: usize, c_inf: f64) -> Result<Self> {
        let width = (2 * half_band + 1).min(n);
        let b = n as f64 * (1.0 - c_inf) / width as f64;
        let nf = n as f64;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j);
            let circ = d.min(n - d);
            if circ <= half_band {
                (c_inf + b) / nf
            } else {
                c_inf / nf
            }
        });
        // Rounding can leave column sums a few ulps away from 1.
        let m = DMatrix::from_fn(n, n, |i, j| m[(i, j)] / m.column(j).sum());
        let m = (&m + m.transpose()) * 0.5;
        Self::new(m, c_inf, c_inf + b)
    }

    pub fn n(&self) -> usize {
        self.sigma_squared.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sigma_squared[(i, j)]
    }
}

/// Unit-variance, mean-zero entry distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryLaw {
    Gaussian,
    Bernoulli,
    Uniform,
}

impl EntryLaw {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            EntryLaw::Gaussian => StandardNormal.sample(rng),
            EntryLaw::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::Uniform => (rng.random::<f64>() * 2.0 - 1.0) * 3f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    Real,
    Complex,
}

/// Eigenvalues of a Wigner matrix with E h_ij = 0 and E|h_ij|² = σ²_ij.
pub fn sample_generalized_wigner<R: Rng + ?Sized>(
    profile: &VarianceProfile,
    law: EntryLaw,
    symmetry: Symmetry,
    rng: &mut R,
) -> Result<ParticleConfiguration> {
    let n = profile.n();
    let eig: Vec<f64> = match symmetry {
        Symmetry::Real => {
            let mut h = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                for i in 0..=j {
                    let x = profile.get(i, j).sqrt() * law.sample(rng);
                    h[(i, j)] = x;
                    h[(j, i)] = x;
                }
            }
            h.symmetric_eigenvalues().iter().copied().collect()
        }
        Symmetry::Complex => {
            let mut h = DMatrix::<Complex<f64>>::zeros(n, n);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for j in 0..n {
                for i in 0..j {
                    let s = profile.get(i, j).sqrt();
                    let z = Complex::new(s * r * law.sample(rng), s * r * law.sample(rng));
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
                h[(j, j)] = Complex::new(profile.get(j, j).sqrt() * law.sample(rng), 0.0);
            }
            h.symmetric_eigenvalues().iter().copied().collect()
        }
    };
    let mut eig = eig;
    eig.sort_by(f64::total_cmp);
    ParticleConfiguration::full(eig, Scaling::Macroscopic).map_err(SamplerError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_profile_column_sums() {
        let p = VarianceProfile::uniform(7).unwrap();
        for j in 0..7 {
            let s: f64 = (0..7).map(|i| p.get(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn band_profile_bounds() {
        let p = VarianceProfile::circular_band(60, 15, 0.5).unwrap();
        let n = 60.0;
        for i in 0..60 {
            for j in 0..60 {
                assert!(p.get(i, j) >= 0.5 / n * (1.0 - 1e-12) && p.get(i, j) <= 2.0 / n);
            }
        }
    }

    #[test]
    fn rejects_bad_profile() {
        let m = DMatrix::from_element(3, 3, 0.5);
        assert!(VarianceProfile::new(m, 0.0, 10.0).is_err());
    }
}

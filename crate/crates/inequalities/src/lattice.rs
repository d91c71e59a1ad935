use serde::{Deserialize, Serialize};

use crate::error::{InequalityError, Result};

/// f: ℤ → ℝ with finite support: `values[k]` is f at `offset + k`, zero
/// elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFunction {
    offset: i64,
    values: Vec<f64>,
}

impl LatticeFunction {
    pub fn new(offset: i64, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(InequalityError::Domain("lattice values must be finite".into()));
        }
        Ok(Self { offset, values })
    }

    pub fn delta(at: i64) -> Self {
        Self { offset: at, values: vec![1.0] }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// f_i (zero off the stored range).
    pub fn at(&self, i: i64) -> f64 {
        let k = i - self.offset;
        if k < 0 || k >= self.values.len() as i64 {
            0.0
        } else {
            self.values[k as usize]
        }
    }

    /// Smallest and largest index with a nonzero value.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_none()
    }

    /// The same values on the support only.
    pub fn trimmed(&self) -> Self {
        match self.support() {
            None => Self { offset: self.offset, values: Vec::new() },
            Some((lo, hi)) => Self {
                offset: lo,
                values: self.values[(lo - self.offset) as usize..=(hi - self.offset) as usize].to_vec(),
            },
        }
    }

    pub fn translated(&self, by: i64) -> Self {
        Self { offset: self.offset + by, values: self.values.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { offset: self.offset, values: self.values.iter().map(|v| c * v).collect() }
    }

    /// ℓ^p norm; `p = f64::INFINITY` gives the sup norm.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
        } else {
            self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Bernoulli numbers B_2, B_4, ..., B_14.
const BERNOULLI: [f64; 7] =
    [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];

/// Hurwitz zeta ζ(σ, q) = Σ_{k≥0} (q + k)^{−σ} for σ > 1, q > 0, by
/// Euler–Maclaurin after ten explicit terms.
pub fn hurwitz_zeta(sigma: f64, q: f64) -> f64 {
    assert!(sigma > 1.0 && q > 0.0, "hurwitz_zeta needs σ > 1 and q > 0");
    let head = 10;
    let mut sum: f64 = (0..head).map(|k| (q + k as f64).powf(-sigma)).sum();
    let x = q + head as f64;
    sum += x.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * x.powf(-sigma);
    // Σ_m B_{2m}/(2m)! · σ(σ+1)···(σ+2m−2) · x^{−σ−2m+1}
    let mut rising = sigma;
    let mut factorial = 2.0;
    for (m, b) in BERNOULLI.iter().enumerate() {
        let order = 2 * (m + 1);
        sum += b / factorial * rising * x.powf(-sigma - order as f64 + 1.0);
        rising *= (sigma + order as f64 - 1.0) * (sigma + order as f64);
        factorial *= ((order + 1) * (order + 2)) as f64;
    }
    sum
}

/// Σ_{i ≠ j ∈ ℤ} |f_i − f_j|²/|i − j|^{1+s} over ordered pairs. Pairs with
/// one end off the support are summed in closed form through Hurwitz tails.
pub fn fractional_energy(f: &LatticeFunction, s: f64) -> f64 {
    let f = f.trimmed();
    let v = f.values();
    let n = v.len();
    let sigma = 1.0 + s;
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = (j - i) as f64;
            total += 2.0 * (v[i] - v[j]).powi(2) / d.powf(sigma);
        }
        // Off the support below and above, both orders.
        let below = hurwitz_zeta(sigma, (i + 1) as f64);
        let above = hurwitz_zeta(sigma, (n - i) as f64);
        total += 2.0 * v[i] * v[i] * (below + above);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // ζ(2, 1/2) = π²/2.
        assert!((hurwitz_zeta(2.0, 0.5) - pi * pi / 2.0).abs() < 1e-13);
        let direct: f64 = (0..2_000_000).map(|k| (3.0 + k as f64).powf(-2.5)).sum::<f64>()
            + (3.0f64 + 2_000_000.0).powf(-1.5) / 1.5;
        assert!((hurwitz_zeta(2.5, 3.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn delta_energy() {
        let e = fractional_energy(&LatticeFunction::delta(7), 1.0);
        assert!((e - 2.0 * std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-13);
    }

    #[test]
    fn trimming_keeps_values() {
        let f = LatticeFunction::new(-3, vec![0.0, 1.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.support(), Some((-2, 0)));
        let t = f.trimmed();
        assert_eq!(t.values(), &[1.0, 0.0, 2.0]);
        assert_eq!(t.at(0), 2.0);
        assert_eq!(t.at(5), 0.0);
    }
}

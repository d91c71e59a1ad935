use std::fmt::Write as _;

use loggas_model::fmt17;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StatsError};

/// Right-continuous empirical distribution function of a finite sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(StatsError::Domain("NaN in sample".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Number of distinct values, i.e. the jumps of the step function.
    pub fn jumps(&self) -> usize {
        let mut count = 0;
        let mut last = None;
        for &v in &self.sorted {
            if last != Some(v) {
                count += 1;
                last = Some(v);
            }
        }
        count
    }

    /// Lower empirical quantile: the smallest sample value with F ≥ p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if self.sorted.is_empty() {
            return Err(StatsError::InsufficientData("empty sample".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::Domain(format!("probability {p} outside [0, 1]")));
        }
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        Ok(self.sorted[idx])
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len().max(1) as f64
    }

    /// `x,F` rows at each distinct sample value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,F\n");
        let n = self.sorted.len();
        for (i, &v) in self.sorted.iter().enumerate() {
            if i + 1 < n && self.sorted[i + 1] == v {
                continue;
            }
            let _ = writeln!(out, "{},{}", fmt17(v), fmt17((i + 1) as f64 / n as f64));
        }
        out
    }
}

/// Two-sample Kolmogorov–Smirnov distance sup_x |F_a(x) − F_b(x)|.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    ks_sorted(a.sorted(), b.sorted())
}

pub(crate) fn ks_sorted(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample Kolmogorov–Smirnov distance to a continuous CDF.
pub fn ks_to_cdf(sample: &EmpiricalCdf, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len() as f64;
    sample
        .sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_function_values() {
        let f = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(2.0), 0.75);
        assert_eq!(f.eval(3.0), 1.0);
        assert_eq!(f.jumps(), 3);
        assert_eq!(f.quantile(0.5).unwrap(), 2.0);
        assert_eq!(f.to_csv().lines().count(), 4);
    }

    #[test]
    fn ks_of_shifted_points() {
        let a = EmpiricalCdf::new(vec![0.0, 1.0]).unwrap();
        let b = EmpiricalCdf::new(vec![0.5, 1.5]).unwrap();
        assert_eq!(ks_distance(&a, &b), 0.5);
        let u = EmpiricalCdf::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(ks_to_cdf(&u, |x| x.clamp(0.0, 1.0)), 0.25);
    }
}

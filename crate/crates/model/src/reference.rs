use serde::{Deserialize, Serialize};

use crate::configuration::IndexWindow;
use crate::error::{ModelError, Result};

/// Classical locations of a density together with equidistant points over a
/// configuration interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLocations {
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl ReferenceLocations {
    pub fn new(gamma: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if gamma.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::Invariant("classical locations must be strictly increasing".into()));
        }
        Ok(Self { gamma, alpha })
    }
}

/// Equidistant points α_j = ȳ + (j − L)/(𝒦 + 1)·|J| for the labels of
/// `window`, where 𝒦 is the window length and ȳ the midpoint of J.
pub fn equidistant_alpha(interval: (f64, f64), window: IndexWindow, center: i64) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(ModelError::Domain(format!("configuration interval ({a}, {b}) is empty or unbounded")));
    }
    if window.lo + window.hi != 2 * center {
        return Err(ModelError::Domain(format!(
            "window [{}, {}] is not centred at {center}",
            window.lo, window.hi
        )));
    }
    let spacing = (b - a) / (window.len() + 1) as f64;
    let mid = 0.5 * (a + b);
    Ok(window.labels().map(|j| mid + (j - center) as f64 * spacing).collect())
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Attached to every report: the estimates are finite-N proxies for
/// statements about N → ∞, and thresholds applied to them are ours.
pub const FINITE_N_CAVEAT: &str =
    "finite-N estimate of an asymptotic statement; acceptance thresholds are chosen, not derived";

/// One estimator result in a form that serializes with sorted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub estimator: String,
    pub params: BTreeMap<String, Value>,
    pub value: f64,
    #[serde(rename = "CI")]
    pub ci: Option<(f64, f64)>,
    pub sample_size: usize,
    pub seed: Option<u64>,
    pub caveat: String,
}

impl StatReport {
    pub fn new(estimator: impl Into<String>, value: f64, sample_size: usize) -> Self {
        Self {
            estimator: estimator.into(),
            params: BTreeMap::new(),
            value,
            ci: None,
            sample_size,
            seed: None,
            caveat: FINITE_N_CAVEAT.into(),
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn with_ci(mut self, ci: (f64, f64)) -> Self {
        self.ci = Some(ci);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> String {
        // Round-trip through Value so nested maps come out key-sorted too.
        let v = serde_json::to_value(self).expect("report is serializable");
        serde_json::to_string_pretty(&v).expect("value is serializable")
    }
}

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sample,
    Dbm,
    Parabolic,
    Stats,
    Verify,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Sample, Kind::Dbm, Kind::Parabolic, Kind::Stats, Kind::Verify];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Sample => "sample",
            Kind::Dbm => "dbm",
            Kind::Parabolic => "parabolic",
            Kind::Stats => "stats",
            Kind::Verify => "verify",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Int,
    Float,
    Choice(&'static [&'static str]),
}

/// One documented key of the schema.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub ty: ValueType,
    /// `None` when the default depends on another key (suite or estimator).
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn spec(key: &'static str, ty: ValueType, default: Option<&'static str>, doc: &'static str) -> KeySpec {
    KeySpec { key, ty, default, doc }
}

use ValueType::{Choice, Float, Int};

const SAMPLE_KEYS: &[KeySpec] = &[
    spec("ensemble", Choice(&["tridiagonal", "wigner", "mcmc"]), Some("tridiagonal"), "sampler"),
    spec("n", Int, Some("200"), "particles"),
    spec("beta", Float, Some("2"), "inverse temperature (wigner: 1 real, 2 complex)"),
    spec("draws", Int, Some("100"), "configurations to write"),
    spec("entries", Choice(&["gaussian", "bernoulli", "uniform"]), Some("gaussian"), "wigner entry law"),
    spec("potential", Choice(&["gaussian", "quartic"]), Some("gaussian"), "mcmc potential V"),
    spec("burn_in", Int, Some("2000"), "mcmc burn-in steps"),
    spec("thin", Int, Some("10"), "mcmc steps between draws"),
];

const DBM_KEYS: &[KeySpec] = &[
    spec("measure", Choice(&["local", "global"]), Some("local"), "local Gaussian gas or the full system"),
    spec("n_total", Int, Some("1024"), "N of the full system"),
    spec("k", Int, Some("16"), "window half-width K (local)"),
    spec("beta", Float, Some("2"), "inverse temperature, at least 1"),
    spec("horizon", Float, Some("10"), "micro time per path"),
    spec("dt", Float, Some("0.01"), "largest integrator step"),
    spec("store_every", Float, Some("0.1"), "spacing of stored states"),
    spec("paths", Int, Some("4"), "independent paths"),
];

const PARABOLIC_KEYS: &[KeySpec] = &[
    spec("kernel", Choice(&["inverse_square", "dbm"]), Some("inverse_square"), "constant B = 1/(i-j)^2, W = 1/d, or a DBM path kernel"),
    spec("k", Int, Some("32"), "window half-width K; 2K+1 sites"),
    spec("n_total", Int, Some("1024"), "N of the full system (dbm kernel)"),
    spec("beta", Float, Some("2"), "inverse temperature (dbm kernel)"),
    spec("horizon", Float, Some("10"), "propagation time"),
    spec("dt", Float, Some("0.25"), "propagator step"),
    spec("scheme", Choice(&["exponential", "implicit_euler"]), Some("exponential"), "time stepper"),
    spec("store_every", Float, Some("0.5"), "frame spacing of the dbm kernel"),
    spec("dbm_dt", Float, Some("0.05"), "integrator step of the dbm path"),
];

const STATS_KEYS: &[KeySpec] = &[
    spec(
        "estimator",
        Choice(&["semicircle", "gaps", "repulsion", "universality", "level_count"]),
        Some("gaps"),
        "statistic to estimate",
    ),
    spec("n", Int, Some("200"), "matrix size of the tridiagonal ensemble"),
    spec("beta", Float, Some("2"), "inverse temperature"),
    spec("draws", Int, Some("1000"), "tridiagonal draws"),
    spec("k", Int, Some("0"), "bulk index (0: N/2)"),
    spec("k2", Int, Some("0"), "second index for universality (0: N/4)"),
    spec("order", Int, Some("1"), "gap order"),
    spec("alpha", Float, Some("0.2"), "level_count window delta = N^(-1-alpha)"),
    spec("resamples", Int, Some("400"), "bootstrap resamples"),
];

const VERIFY_KEYS: &[KeySpec] = &[
    spec(
        "suite",
        Choice(&[
            "semicircle",
            "repulsion",
            "universality",
            "decay",
            "representation",
            "propagator",
            "holder",
            "ordering",
            "gn",
            "regularity",
        ]),
        Some("decay"),
        "check to run",
    ),
    spec("n", Int, None, "particles (semicircle, repulsion, ordering)"),
    spec("n_total", Int, None, "N of the full system (decay, representation, regularity)"),
    spec("k", Int, None, "window half-width K"),
    spec("beta", Float, None, "inverse temperature"),
    spec("draws", Int, None, "independent draws"),
    spec("paths", Int, None, "DBM paths or segments"),
    spec("segment", Float, None, "segment length in micro time (decay)"),
    spec("store_every", Float, None, "stored-state spacing"),
    spec("dt", Float, None, "integrator step"),
    spec("burn_in", Float, None, "equilibration time before the first segment (decay)"),
    spec("horizon", Float, None, "time horizon"),
    spec("tolerance", Float, None, "relative slack on bounds"),
    spec("pairs", Int, None, "observable pairs (representation)"),
    spec("chains", Int, None, "direct MCMC chains (representation)"),
    spec("samples", Int, None, "samples per chain"),
    spec("kernels", Int, None, "random kernels (propagator)"),
    spec("runs", Int, None, "DBM integrations (ordering)"),
    spec("trials", Int, None, "fuzz functions (gn)"),
    spec("xi", Float, None, "regularity exponent"),
    spec("resamples", Int, None, "bootstrap resamples"),
    spec("wigner_draws", Int, None, "Wigner matrices (universality)"),
    spec("goe_draws", Int, None, "tridiagonal draws (universality)"),
    spec("index_draws", Int, None, "draws for the index check (universality)"),
];

/// Documented keys of an experiment kind, besides `kind`, `seed`,
/// `workers` and `output`.
pub fn schema(kind: Kind) -> &'static [KeySpec] {
    match kind {
        Kind::Sample => SAMPLE_KEYS,
        Kind::Dbm => DBM_KEYS,
        Kind::Parabolic => PARABOLIC_KEYS,
        Kind::Stats => STATS_KEYS,
        Kind::Verify => VERIFY_KEYS,
    }
}

/// Schema of every kind as text, one key per line.
pub fn schema_text() -> String {
    let mut out = String::from(
        "common keys:\n  kind      sample|dbm|parabolic|stats|verify\n  seed      u64 master seed (default 0)\n  \
         workers   worker threads (default 1)\n  output    output directory, relative to the output root\n",
    );
    for kind in Kind::ALL {
        let _ = writeln!(out, "{kind}:");
        for s in schema(kind) {
            let ty = match s.ty {
                Int => "int".to_string(),
                Float => "float".to_string(),
                Choice(c) => c.join("|"),
            };
            let _ = writeln!(out, "  {:<13} {:<10} default {:<12} {}", s.key, ty, s.default.unwrap_or("per suite"), s.doc);
        }
    }
    out
}

/// A parsed experiment description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<String>,
    /// Validated schema keys, stored as written.
    pub params: BTreeMap<String, String>,
}

fn check_value(kind: Kind, key: &str, value: &str) -> Result<()> {
    let spec = schema(kind)
        .iter()
        .find(|s| s.key == key)
        .ok_or_else(|| HarnessError::config(format!("{kind}.{key}"), "unknown key"))?;
    let ok = match spec.ty {
        Int => value.parse::<u64>().is_ok(),
        Float => value.parse::<f64>().is_ok_and(f64::is_finite),
        Choice(c) => c.contains(&value),
    };
    if !ok {
        return Err(HarnessError::config(format!("{kind}.{key}"), format!("invalid value `{value}` ({:?})", spec.ty)));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> Self {
        Self { kind, seed: 0, workers: 1, output: None, params: BTreeMap::new() }
    }

    /// Set a schema key, validating it.
    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<&mut Self> {
        let value = value.to_string();
        check_value(self.kind, key, &value)?;
        self.params.insert(key.to_string(), value);
        Ok(self)
    }

    /// Parse `key = value` lines; `#` starts a comment. `kind` may be left out
    /// when `default_kind` is given, and must agree with it otherwise.
    pub fn parse(text: &str, default_kind: Option<Kind>) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::config(format!("line {}", no + 1), "expected `key = value`"))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if entries.iter().any(|(_, e, _)| *e == k) {
                return Err(HarnessError::config(format!("line {}: {k}", no + 1), "duplicate key"));
            }
            entries.push((no + 1, k, v));
        }
        let declared = entries.iter().find(|(_, k, _)| k == "kind").map(|(line, _, v)| (line, v.clone()));
        let kind = match (declared, default_kind) {
            (Some((line, v)), default) => {
                let kind = v.parse::<Kind>().map_err(|e| HarnessError::config(format!("line {line}: kind"), e))?;
                if default.is_some_and(|d| d != kind) {
                    return Err(HarnessError::config(
                        format!("line {line}: kind"),
                        format!("config is `{kind}` but `{}` was requested", default.unwrap()),
                    ));
                }
                kind
            }
            (None, Some(d)) => d,
            (None, None) => return Err(HarnessError::config("kind", "missing experiment kind")),
        };
        let mut config = Self::new(kind);
        for (line, k, v) in entries {
            let path = format!("line {line}: {k}");
            match k.as_str() {
                "kind" => {}
                "seed" => config.seed = v.parse().map_err(|_| HarnessError::config(path, format!("`{v}` is not a u64")))?,
                "workers" => {
                    config.workers = v
                        .parse()
                        .ok()
                        .filter(|&w: &usize| w >= 1)
                        .ok_or_else(|| HarnessError::config(path, format!("`{v}` is not a positive count")))?
                }
                "output" => config.output = Some(v),
                _ => {
                    check_value(kind, &k, &v).map_err(|e| match e {
                        HarnessError::Config { message, .. } => HarnessError::config(path, message),
                        other => other,
                    })?;
                    config.params.insert(k, v);
                }
            }
        }
        Ok(config)
    }

    /// Canonical text: common keys first, then schema keys in sorted order.
    pub fn to_text(&self) -> String {
        let mut out = format!("kind = {}\nseed = {}\nworkers = {}\n", self.kind, self.seed, self.workers);
        if let Some(o) = &self.output {
            let _ = writeln!(out, "output = {o}");
        }
        for (k, v) in &self.params {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// SHA-256 of everything but `workers` and `output`, which do not change
    /// the results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = 1;
        canonical.output = None;
        hex(&Sha256::digest(canonical.to_text().as_bytes()))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params
            .get(key)
            .map(String::as_str)
            .or_else(|| schema(self.kind).iter().find(|s| s.key == key).and_then(|s| s.default))
    }

    fn typed<T: FromStr>(&self, key: &str, fallback: T) -> Result<T> {
        match self.raw(key) {
            Some(v) => v.parse().map_err(|_| HarnessError::config(format!("{}.{key}", self.kind), format!("bad value `{v}`"))),
            None => Ok(fallback),
        }
    }

    /// Integer key, or `fallback` when neither set nor defaulted by the schema.
    pub fn int(&self, key: &str, fallback: u64) -> Result<u64> {
        self.typed(key, fallback)
    }

    pub fn usize(&self, key: &str, fallback: usize) -> Result<usize> {
        self.typed(key, fallback)
    }

    pub fn float(&self, key: &str, fallback: f64) -> Result<f64> {
        self.typed(key, fallback)
    }

    pub fn text(&self, key: &str) -> &str {
        self.raw(key).unwrap_or("")
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::format::fmt17;

/// Unit convention of a configuration. Microscopic positions are macroscopic
/// positions multiplied by the global particle count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    Macroscopic,
    Microscopic,
}

impl Scaling {
    pub fn as_str(self) -> &'static str {
        match self {
            Scaling::Macroscopic => "macroscopic",
            Scaling::Microscopic => "microscopic",
        }
    }
}

/// Inclusive integer index range `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(ModelError::Domain(format!("empty index window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Window `center-half..=center+half`.
    pub fn centered(center: i64, half: i64) -> Result<Self> {
        if half < 0 {
            return Err(ModelError::Domain(format!("negative half-width {half}")));
        }
        Self::new(center - half, center + half)
    }

    /// Window `1..=n`, the labelling of a full N-particle system.
    pub fn full(n: usize) -> Self {
        Self { lo: 1, hi: n as i64 }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }

    /// Position of label `j` inside a vector indexed from `lo`.
    pub fn offset(&self, j: i64) -> Option<usize> {
        self.contains(j).then(|| (j - self.lo) as usize)
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// Strictly increasing particle positions labelled by an index window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfiguration {
    positions: Vec<f64>,
    window: IndexWindow,
    scaling: Scaling,
}

impl ParticleConfiguration {
    pub fn new(positions: Vec<f64>, window: IndexWindow, scaling: Scaling) -> Result<Self> {
        if positions.len() != window.len() {
            return Err(ModelError::Invariant(format!(
                "window has {} labels but {} positions were given",
                window.len(),
                positions.len()
            )));
        }
        if let Some(bad) = positions.iter().position(|x| !x.is_finite()) {
            return Err(ModelError::Invariant(format!("non-finite position at offset {bad}")));
        }
        if let Some(i) = positions.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ModelError::Invariant(format!(
                "positions not strictly increasing at offset {i}: {} then {}",
                positions[i],
                positions[i + 1]
            )));
        }
        Ok(Self { positions, window, scaling })
    }

    /// Sorts first; useful for samplers whose raw output is exchangeable.
    pub fn from_unsorted(mut positions: Vec<f64>, window: IndexWindow, scaling: Scaling) -> Result<Self> {
        positions.sort_by(f64::total_cmp);
        Self::new(positions, window, scaling)
    }

    /// Labels `1..=n`.
    pub fn full(positions: Vec<f64>, scaling: Scaling) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, IndexWindow::full(n), scaling)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn into_positions(self) -> Vec<f64> {
        self.positions
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position of label `j`.
    pub fn at(&self, j: i64) -> Option<f64> {
        self.window.offset(j).map(|o| self.positions[o])
    }

    pub fn min_gap(&self) -> f64 {
        self.positions
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Multiply positions by `n`; only valid on macroscopic input.
    pub fn micro_rescale(&self, n: usize) -> Result<Self> {
        if self.scaling == Scaling::Microscopic {
            return Err(ModelError::Contract("configuration is already microscopic".into()));
        }
        if n == 0 {
            return Err(ModelError::Domain("rescaling by N = 0".into()));
        }
        let s = n as f64;
        Ok(Self {
            positions: self.positions.iter().map(|x| x * s).collect(),
            window: self.window,
            scaling: Scaling::Microscopic,
        })
    }

    /// Inverse of [`micro_rescale`](Self::micro_rescale).
    pub fn macro_rescale(&self, n: usize) -> Result<Self> {
        if self.scaling == Scaling::Macroscopic {
            return Err(ModelError::Contract("configuration is already macroscopic".into()));
        }
        if n == 0 {
            return Err(ModelError::Domain("rescaling by N = 0".into()));
        }
        let s = n as f64;
        Ok(Self {
            positions: self.positions.iter().map(|x| x / s).collect(),
            window: self.window,
            scaling: Scaling::Macroscopic,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("index,position,scaling\n");
        for (j, x) in self.window.labels().zip(&self.positions) {
            let _ = writeln!(out, "{j},{},{}", fmt17(*x), self.scaling.as_str());
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("index,position,scaling") => {}
            other => return Err(ModelError::Domain(format!("unexpected CSV header {other:?}"))),
        }
        let mut labels = Vec::new();
        let mut positions = Vec::new();
        let mut scaling = None;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split(',');
            let (Some(j), Some(x), Some(s)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ModelError::Domain(format!("malformed CSV row {line:?}")));
            };
            let j: i64 = j.trim().parse().map_err(|_| ModelError::Domain(format!("bad index {j:?}")))?;
            let x: f64 = x.trim().parse().map_err(|_| ModelError::Domain(format!("bad position {x:?}")))?;
            let s = match s.trim() {
                "macroscopic" => Scaling::Macroscopic,
                "microscopic" => Scaling::Microscopic,
                other => return Err(ModelError::Domain(format!("bad scaling {other:?}"))),
            };
            if scaling.is_some_and(|prev| prev != s) {
                return Err(ModelError::Domain("mixed scalings in one file".into()));
            }
            scaling = Some(s);
            labels.push(j);
            positions.push(x);
        }
        let (Some(&lo), Some(&hi)) = (labels.first(), labels.last()) else {
            return Err(ModelError::Domain("empty configuration file".into()));
        };
        if labels.iter().enumerate().any(|(i, &j)| j != lo + i as i64) {
            return Err(ModelError::Domain("labels are not consecutive".into()));
        }
        Self::new(positions, IndexWindow::new(lo, hi)?, scaling.unwrap_or(Scaling::Macroscopic))
    }
}

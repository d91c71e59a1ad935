use serde::{Deserialize, Serialize};

use crate::chebyshev::Chebyshev;
use crate::configuration::{IndexWindow, Scaling};
use crate::error::{ModelError, Result};
use crate::potential::PotentialModel;
use crate::regularized::log_eps;

/// Frozen particles outside an index window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    below: Vec<f64>,
    above: Vec<f64>,
    n_total: usize,
    scaling: Scaling,
}

impl BoundaryData {
    /// `below` and `above` must each be sorted increasingly and separated.
    /// `n_total` is the global particle count N.
    pub fn new(below: Vec<f64>, above: Vec<f64>, n_total: usize, scaling: Scaling) -> Result<Self> {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite());
        if !sorted(&below) || !sorted(&above) {
            return Err(ModelError::Invariant("external points must be finite and strictly increasing".into()));
        }
        if let (Some(l), Some(r)) = (below.last(), above.first()) {
            if l >= r {
                return Err(ModelError::Invariant(format!("lower boundary {l} not below upper boundary {r}")));
            }
        }
        if n_total == 0 {
            return Err(ModelError::Domain("global particle count must be positive".into()));
        }
        Ok(Self { below, above, n_total, scaling })
    }

    /// Split a full labelled system (labels `1..=N`) into the frozen points
    /// outside `window`.
    pub fn from_full(positions: &[f64], window: IndexWindow, scaling: Scaling) -> Result<Self> {
        let n = positions.len() as i64;
        if window.lo < 1 || window.hi > n {
            return Err(ModelError::Domain(format!("window [{}, {}] outside 1..={n}", window.lo, window.hi)));
        }
        let below = positions[..(window.lo - 1) as usize].to_vec();
        let above = positions[window.hi as usize..].to_vec();
        Self::new(below, above, positions.len(), scaling)
    }

    pub fn below(&self) -> &[f64] {
        &self.below
    }

    pub fn above(&self) -> &[f64] {
        &self.above
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// Open configuration interval between the innermost external points.
    pub fn interval(&self) -> (f64, f64) {
        (
            self.below.last().copied().unwrap_or(f64::NEG_INFINITY),
            self.above.first().copied().unwrap_or(f64::INFINITY),
        )
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.interval();
        b - a
    }

    pub fn midpoint(&self) -> f64 {
        let (a, b) = self.interval();
        0.5 * (a + b)
    }

    pub fn strictly_inside(&self, x: f64) -> bool {
        let (a, b) = self.interval();
        a < x && x < b
    }

    pub fn contains_all(&self, xs: &[f64]) -> bool {
        xs.iter().all(|&x| self.strictly_inside(x))
    }

    /// All external points in increasing order.
    pub fn external_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.below.iter().chain(self.above.iter()).copied()
    }

    /// Same points with the scaling flipped to microscopic.
    pub fn micro_rescale(&self) -> Result<Self> {
        if self.scaling == Scaling::Microscopic {
            return Err(ModelError::Contract("boundary is already microscopic".into()));
        }
        let s = self.n_total as f64;
        Ok(Self {
            below: self.below.iter().map(|x| x * s).collect(),
            above: self.above.iter().map(|x| x * s).collect(),
            n_total: self.n_total,
            scaling: Scaling::Microscopic,
        })
    }
}

/// Value and first two derivatives of a one-body potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl PotentialValue {
    pub const ZERO: Self = Self { value: 0.0, first: 0.0, second: 0.0 };

    pub fn scaled(self, s: f64) -> Self {
        Self { value: s * self.value, first: s * self.first, second: s * self.second }
    }

    pub fn plus(self, o: Self) -> Self {
        Self { value: self.value + o.value, first: self.first + o.first, second: self.second + o.second }
    }
}

/// Confining part in the boundary's units: V(x) (macroscopic) or N V(x/N)
/// (microscopic).
fn confining(v: &PotentialModel, x: f64, n: usize, scaling: Scaling) -> PotentialValue {
    match scaling {
        Scaling::Macroscopic => PotentialValue { value: v.value(x), first: v.first(x), second: v.second(x) },
        Scaling::Microscopic => {
            let nf = n as f64;
            let u = x / nf;
            PotentialValue { value: nf * v.value(u), first: v.first(u), second: v.second(u) / nf }
        }
    }
}

/// Weight of the external logarithms: 2/N macroscopic, 2 microscopic.
fn log_weight(n: usize, scaling: Scaling) -> f64 {
    match scaling {
        Scaling::Macroscopic => 2.0 / n as f64,
        Scaling::Microscopic => 2.0,
    }
}

/// External potential V_y and its derivatives at `x`, by direct summation.
pub fn external_potential(v: &PotentialModel, boundary: &BoundaryData, x: f64) -> Result<PotentialValue> {
    if boundary.external_points().any(|y| y == x) {
        return Err(ModelError::Singularity { x });
    }
    if !boundary.strictly_inside(x) {
        let (a, b) = boundary.interval();
        return Err(ModelError::Domain(format!("x = {x} outside configuration interval ({a}, {b})")));
    }
    let mut logs = 0.0;
    let mut inv = 0.0;
    let mut inv2 = 0.0;
    for y in boundary.external_points() {
        let d = x - y;
        logs += d.abs().ln();
        inv += 1.0 / d;
        inv2 += 1.0 / (d * d);
    }
    let w = log_weight(boundary.n_total, boundary.scaling);
    let base = confining(v, x, boundary.n_total, boundary.scaling);
    Ok(PotentialValue { value: base.value - w * logs, first: base.first - w * inv, second: base.second + w * inv2 })
}

/// External potential with the smooth far part of the boundary replaced by
/// a Chebyshev interpolant on J. Near points are summed exactly; with
/// `regularization = Some(eps)` they use `log_eps` so that positions may
/// leave J.
#[derive(Debug, Clone)]
pub struct ExternalField {
    potential: PotentialModel,
    n_total: usize,
    scaling: Scaling,
    interval: (f64, f64),
    near_below: Vec<f64>,
    near_above: Vec<f64>,
    all_below: Vec<f64>,
    all_above: Vec<f64>,
    far: Option<[Chebyshev; 3]>,
    weight: f64,
    regularization: Option<f64>,
}

impl ExternalField {
    pub const DEGREE: usize = 32;

    pub fn new(v: &PotentialModel, boundary: &BoundaryData, regularization: Option<f64>) -> Result<Self> {
        if boundary.below().is_empty() || boundary.above().is_empty() {
            return Err(ModelError::Domain("external field needs points on both sides".into()));
        }
        if let Some(eps) = regularization {
            if !(eps > 0.0) {
                return Err(ModelError::Domain(format!("regularization {eps} must be positive")));
            }
        }
        let (a, b) = boundary.interval();
        let len = b - a;
        // Far points sit at least |J|/4 beyond J, where a degree-32 fit of
        // their logarithms is accurate to ~1e-13 relative.
        let lo_cut = a - 0.25 * len;
        let hi_cut = b + 0.25 * len;
        let below = boundary.below();
        let above = boundary.above();
        let nb = below.iter().filter(|&&y| y > lo_cut).count().max(4).min(below.len());
        let na = above.iter().filter(|&&y| y < hi_cut).count().max(4).min(above.len());
        let near_below = below[below.len() - nb..].to_vec();
        let near_above = above[..na].to_vec();
        let far_points: Vec<f64> = below[..below.len() - nb].iter().chain(&above[na..]).copied().collect();
        let weight = log_weight(boundary.n_total(), boundary.scaling());
        let far = (!far_points.is_empty()).then(|| {
            let fp = far_points.clone();
            let value = Chebyshev::fit(move |x| -fp.iter().map(|y| (x - y).abs().ln()).sum::<f64>(), a, b, Self::DEGREE);
            let first = value.derivative();
            let second = first.derivative();
            [value, first, second]
        });
        Ok(Self {
            potential: v.clone(),
            n_total: boundary.n_total(),
            scaling: boundary.scaling(),
            interval: (a, b),
            near_below,
            near_above,
            all_below: below.to_vec(),
            all_above: above.to_vec(),
            far,
            weight,
            regularization,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn regularization(&self) -> Option<f64> {
        self.regularization
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    fn log_terms(&self, points: impl Iterator<Item = (f64, f64)>) -> PotentialValue {
        // Each item is (x - y, sign) where sign orients the argument of the log.
        let mut acc = PotentialValue::ZERO;
        for (d, sign) in points {
            let arg = sign * d;
            let (l, l1, l2) = match self.regularization {
                Some(eps) => log_eps(arg, eps),
                None => (arg.ln(), 1.0 / arg, -1.0 / (arg * arg)),
            };
            acc.value += l;
            acc.first += sign * l1;
            acc.second += l2;
        }
        acc
    }

    /// First and second derivative at `x` without the logarithms of the
    /// value; what gradient and Hessian evaluations need.
    pub fn slope(&self, x: f64) -> (f64, f64) {
        let base = confining(&self.potential, x, self.n_total, self.scaling);
        let (a, b) = self.interval;
        let (mut d1, mut d2) = (0.0, 0.0);
        let mut add = |d: f64, sign: f64| {
            let arg = sign * d;
            let (l1, l2) = match self.regularization {
                Some(eps) => {
                    let (_, l1, l2) = log_eps(arg, eps);
                    (l1, l2)
                }
                None => {
                    let inv = 1.0 / arg;
                    (inv, -inv * inv)
                }
            };
            d1 += sign * l1;
            d2 += l2;
        };
        match &self.far {
            Some(far) if a <= x && x <= b => {
                self.near_below.iter().for_each(|y| add(x - y, 1.0));
                self.near_above.iter().for_each(|y| add(x - y, -1.0));
                d1 -= far[1].eval(x);
                d2 -= far[2].eval(x);
            }
            _ => {
                self.all_below.iter().for_each(|y| add(x - y, 1.0));
                self.all_above.iter().for_each(|y| add(x - y, -1.0));
            }
        }
        (base.first - self.weight * d1, base.second - self.weight * d2)
    }

    /// Value and derivatives at `x`. Positions outside J are only meaningful
    /// for the regularized field.
    pub fn eval(&self, x: f64) -> PotentialValue {
        let base = confining(&self.potential, x, self.n_total, self.scaling);
        let (a, b) = self.interval;
        let inside = a <= x && x <= b;
        let logs = match (&self.far, inside) {
            (Some(far), true) => {
                let near = self.log_terms(
                    self.near_below.iter().map(|y| (x - y, 1.0)).chain(self.near_above.iter().map(|y| (x - y, -1.0))),
                );
                let far = PotentialValue { value: -far[0].eval(x), first: -far[1].eval(x), second: -far[2].eval(x) };
                near.plus(far)
            }
            _ => self.log_terms(
                self.all_below.iter().map(|y| (x - y, 1.0)).chain(self.all_above.iter().map(|y| (x - y, -1.0))),
            ),
        };
        // V_y = base - w * Σ log, so derivatives flip sign accordingly.
        PotentialValue {
            value: base.value - self.weight * logs.value,
            first: base.first - self.weight * logs.first,
            second: base.second - self.weight * logs.second,
        }
    }
}

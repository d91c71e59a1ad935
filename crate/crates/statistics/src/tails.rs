use loggas_model::{ParticleConfiguration, ReferenceLocations};
use serde::{Deserialize, Serialize};

use crate::error::{Result, StatsError};

/// Weighted least-squares line through a tail curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    /// Normal 95% interval of the slope from the regression residuals.
    pub ci: (f64, f64),
    /// Fit range in the abscissa of the data (s or u).
    pub range: (f64, f64),
    pub r_squared: f64,
    /// (abscissa, exceedance or cumulative probability) pairs entering the fit.
    pub points: Vec<(f64, f64)>,
    pub sample_size: usize,
    /// Samples at or below the upper end of the range (repulsion) or at or
    /// above the lower end (rigidity).
    pub events: usize,
}

/// Fit y = intercept + slope·x with weights w.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let m = x.len();
    if m < 3 {
        return None;
    }
    let sw: f64 = w.iter().sum();
    let xb = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let yb = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - xb).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (x - xb) * (y - yb)).sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let rss: f64 = x.iter().zip(y).zip(w).map(|((x, y), w)| w * (y - intercept - slope * x).powi(2)).sum();
    let tss: f64 = y.iter().zip(w).map(|(y, w)| w * (y - yb).powi(2)).sum();
    let se = (rss / (m - 2) as f64 / sxx).sqrt();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    Some((slope, intercept, se, r2))
}

fn sorted_sample(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(StatsError::Domain("NaN in sample".into()));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

const GRID_POINTS: usize = 20;

/// Which gap a repulsion fit looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapOrder {
    /// x_{i+1} − x_i
    First,
    /// x_{i+2} − x_i
    Second,
}

impl GapOrder {
    pub fn span(self) -> usize {
        match self {
            GapOrder::First => 1,
            GapOrder::Second => 2,
        }
    }
}

/// Small-gap fit range: s_max is the `upper` quantile, s_min the `lower`
/// quantile or s_max/10^`min_decades`, whichever is smaller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepulsionRange {
    pub lower: f64,
    pub upper: f64,
    pub min_decades: f64,
    pub min_samples: usize,
    pub min_events: usize,
}

impl Default for RepulsionRange {
    fn default() -> Self {
        Self { lower: 0.001, upper: 0.05, min_decades: 1.0, min_samples: 10_000, min_events: 100 }
    }
}

/// Log-log slope of P(gap ≤ s) against s over small s. Grid points are
/// log-spaced and weighted by their event counts.
pub fn repulsion_fit(gaps: &[f64], range: &RepulsionRange) -> Result<TailFit> {
    if gaps.len() < range.min_samples {
        return Err(StatsError::InsufficientData(format!(
            "{} gaps; at least {} are needed",
            gaps.len(),
            range.min_samples
        )));
    }
    let sorted = sorted_sample(gaps)?;
    if sorted[0] < 0.0 {
        return Err(StatsError::Domain("negative gap".into()));
    }
    let n = sorted.len() as f64;
    let s_max = quantile(&sorted, range.upper);
    let events = sorted.partition_point(|&g| g <= s_max);
    if events < range.min_events {
        return Err(StatsError::RangeShrink(format!("{events} gaps below s_max = {s_max}")));
    }
    let s_min = quantile(&sorted, range.lower).min(s_max / 10f64.powf(range.min_decades));
    if !(s_min > 0.0) {
        return Err(StatsError::RangeShrink("fit range reaches zero".into()));
    }
    let (mut x, mut y, mut w, mut points) = (vec![], vec![], vec![], vec![]);
    for i in 0..GRID_POINTS {
        let s = s_min * (s_max / s_min).powf(i as f64 / (GRID_POINTS - 1) as f64);
        let c = sorted.partition_point(|&g| g <= s);
        if c > 0 {
            let p = c as f64 / n;
            x.push(s.ln());
            y.push(p.ln());
            w.push(c as f64);
            points.push((s, p));
        }
    }
    let (slope, intercept, se, r_squared) = weighted_line(&x, &y, &w)
        .ok_or_else(|| StatsError::RangeShrink("fewer than three populated grid points".into()))?;
    Ok(TailFit {
        slope,
        intercept,
        ci: (slope - 1.96 * se, slope + 1.96 * se),
        range: (s_min, s_max),
        r_squared,
        points,
        sample_size: sorted.len(),
        events,
    })
}

/// Repulsion fit of the gap starting at label `i` of each configuration.
pub fn level_repulsion_exponent(
    samples: &[ParticleConfiguration],
    i: i64,
    order: GapOrder,
    range: &RepulsionRange,
) -> Result<TailFit> {
    let gaps = samples
        .iter()
        .map(|s| match (s.at(i), s.at(i + order.span() as i64)) {
            (Some(a), Some(b)) => Ok(b - a),
            _ => Err(StatsError::Domain(format!("label {i} has no {order:?} gap in the window"))),
        })
        .collect::<Result<Vec<_>>>()?;
    repulsion_fit(&gaps, range)
}

/// Fewest samples accepted by [`gaussian_tail_fit`].
pub const MIN_RIGIDITY_SAMPLES: usize = 1000;
const MIN_EXCEEDANCES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityTail {
    /// (u, P(|d| ≥ u)) on a grid from 0 to the largest deviation.
    pub curve: Vec<(f64, f64)>,
    /// ln P against u²; the slope estimates −c.
    pub fit: Option<TailFit>,
    pub gaussian_tail: bool,
    pub warnings: Vec<String>,
}

/// Fit ln P(|d| ≥ u) against u² for deviations already divided by the
/// scale. The range runs from the 0.8 quantile of |d| to the point with ten
/// exceedances left; when that is empty it is widened down to the median.
pub fn gaussian_tail_fit(deviations: &[f64]) -> Result<RigidityTail> {
    if deviations.len() < MIN_RIGIDITY_SAMPLES {
        return Err(StatsError::InsufficientData(format!(
            "{} samples; at least {MIN_RIGIDITY_SAMPLES} are needed",
            deviations.len()
        )));
    }
    let d: Vec<f64> = deviations.iter().map(|v| v.abs()).collect();
    let sorted = sorted_sample(&d)?;
    let n = sorted.len();
    let exceed = |u: f64| (n - sorted.partition_point(|&v| v < u)) as f64 / n as f64;
    let top = sorted[n - 1];
    let curve: Vec<(f64, f64)> = (0..=GRID_POINTS)
        .map(|i| {
            let u = top * i as f64 / GRID_POINTS as f64;
            (u, if top == 0.0 && i > 0 { 0.0 } else { exceed(u) })
        })
        .collect();
    let mut warnings = vec![];
    if top == 0.0 {
        return Ok(RigidityTail { curve, fit: None, gaussian_tail: false, warnings });
    }
    let u_hi = sorted[n - MIN_EXCEEDANCES];
    let mut u_lo = quantile(&sorted, 0.8);
    if !(u_hi > u_lo) {
        u_lo = quantile(&sorted, 0.5);
        warnings.push(format!("fewer than {MIN_EXCEEDANCES} exceedances above the 0.8 quantile; range widened"));
    }
    if !(u_hi > u_lo) {
        warnings.push("tail has no spread; no fit".into());
        return Ok(RigidityTail { curve, fit: None, gaussian_tail: false, warnings });
    }
    let (mut x, mut y, mut w, mut points) = (vec![], vec![], vec![], vec![]);
    for i in 0..GRID_POINTS {
        let u2 = u_lo * u_lo + (u_hi * u_hi - u_lo * u_lo) * i as f64 / (GRID_POINTS - 1) as f64;
        let p = exceed(u2.sqrt());
        if p > 0.0 {
            x.push(u2);
            y.push(p.ln());
            w.push(p * n as f64);
            points.push((u2.sqrt(), p));
        }
    }
    let fit = weighted_line(&x, &y, &w).map(|(slope, intercept, se, r_squared)| TailFit {
        slope,
        intercept,
        ci: (slope - 1.96 * se, slope + 1.96 * se),
        range: (u_lo, u_hi),
        r_squared,
        points,
        sample_size: n,
        events: n - sorted.partition_point(|&v| v < u_lo),
    });
    let gaussian_tail = fit.as_ref().is_some_and(|f| f.slope < 0.0 && f.r_squared > 0.95);
    Ok(RigidityTail { curve, fit, gaussian_tail, warnings })
}

/// Tail of |x_k − α_k|/scale over configurations sharing one window;
/// `reference.alpha` is indexed by window offset.
pub fn rigidity_tail(
    samples: &[ParticleConfiguration],
    reference: &ReferenceLocations,
    k: i64,
    scale: f64,
) -> Result<RigidityTail> {
    if !(scale > 0.0) {
        return Err(StatsError::Domain(format!("scale {scale} must be positive")));
    }
    let deviations = samples
        .iter()
        .map(|s| {
            let off = s.window().offset(k).ok_or_else(|| StatsError::Domain(format!("label {k} outside the window")))?;
            let alpha = reference
                .alpha
                .get(off)
                .ok_or_else(|| StatsError::Domain(format!("no reference point for label {k}")))?;
            Ok((s.positions()[off] - alpha) / scale)
        })
        .collect::<Result<Vec<_>>>()?;
    gaussian_tail_fit(&deviations)
}

use std::io::{self, Write};

use loggas_model::{fmt17, stream_rng, ParticleConfiguration, Scaling};
use loggas_samplers::LogGasMeasure;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DynamicsError, Result};

/// Gaps below this (microscopic units) count as a collision.
pub const GAP_FLOOR: f64 = 1e-12;

/// Step control for [`integrate_dbm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbmParams {
    /// Largest Euler–Maruyama step.
    pub dt: f64,
    /// Spacing of stored states.
    pub store_every: f64,
    /// Brownian forcing on or off (off gives the gradient flow).
    pub noise: bool,
    /// How many times a cluster sub-step may be halved because of a small gap.
    pub max_halvings: u32,
    /// Rejected proposals allowed per step before giving up.
    pub max_retries: u32,
}

impl Default for DbmParams {
    fn default() -> Self {
        Self { dt: 1e-2, store_every: 0.1, noise: true, max_halvings: 40, max_retries: 200 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DbmDiagnostics {
    pub accepted_steps: u64,
    /// Small steps taken inside tight clusters.
    pub substeps: u64,
    /// Proposals thrown away because they left the support (crossing or exit).
    pub rejected_steps: u64,
    /// Accepted steps whose state was not strictly ordered.
    pub ordering_violations: u64,
    pub smallest_step: f64,
    pub smallest_gap: f64,
}

/// Stored trajectory of the SDE dx = dB − (β/2)∇E(x) dt.
#[derive(Debug, Clone)]
pub struct DbmPath {
    times: Vec<f64>,
    states: Vec<ParticleConfiguration>,
    measure: LogGasMeasure,
    diagnostics: DbmDiagnostics,
}

impl DbmPath {
    /// Assemble a path from stored states; used for synthetic paths in tests
    /// and replays.
    pub fn from_states(times: Vec<f64>, states: Vec<ParticleConfiguration>, measure: LogGasMeasure) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(DynamicsError::Domain("need one state per stored time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::Domain("stored times must increase".into()));
        }
        if states.iter().any(|s| s.len() != measure.len()) {
            return Err(DynamicsError::Domain("state size does not match the measure".into()));
        }
        Ok(Self { times, states, measure, diagnostics: DbmDiagnostics::default() })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ParticleConfiguration] {
        &self.states
    }

    pub fn beta(&self) -> f64 {
        self.measure.beta()
    }

    pub fn measure(&self) -> &LogGasMeasure {
        &self.measure
    }

    pub fn diagnostics(&self) -> &DbmDiagnostics {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &ParticleConfiguration {
        self.states.last().expect("paths are never empty")
    }

    /// Stored states `range`, with times shifted so the first is zero.
    pub fn segment(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.is_empty() || range.end > self.len() {
            return Err(DynamicsError::Domain(format!("segment {range:?} outside 0..{}", self.len())));
        }
        let t0 = self.times[range.start];
        Ok(Self {
            times: self.times[range.clone()].iter().map(|t| t - t0).collect(),
            states: self.states[range].to_vec(),
            measure: self.measure.clone(),
            diagnostics: self.diagnostics.clone(),
        })
    }

    /// `t,index,position` rows, one per particle and stored time.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,index,position")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            for (j, x) in s.window().labels().zip(s.positions()) {
                writeln!(w, "{},{},{}", fmt17(*t), j, fmt17(*x))?;
            }
        }
        Ok(())
    }
}

fn smallest_clearance(x: &[f64], interval: Option<(f64, f64)>) -> f64 {
    let mut g = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if let Some((a, b)) = interval {
        g = g.min(x[0] - a).min(b - x[x.len() - 1]);
    }
    g
}

/// Maximal runs of consecutive particles joined by gaps below `threshold`;
/// a particle within `threshold` of an end of J forms a run on its own.
fn tight_clusters(x: &[f64], interval: Option<(f64, f64)>, threshold: f64) -> Vec<std::ops::Range<usize>> {
    let n = x.len();
    let near_wall = |i: usize| match interval {
        Some((a, b)) => (i == 0 && x[0] - a < threshold) || (i == n - 1 && b - x[n - 1] < threshold),
        None => false,
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[j + 1] - x[j] < threshold {
            j += 1;
        }
        if j > i || near_wall(i) {
            out.push(i..j + 1);
        }
        i = j + 1;
    }
    out
}

/// Per-run scratch for the multirate step.
struct Stepper {
    beta: f64,
    params: DbmParams,
}

impl Stepper {
    /// Pair forces inside the cluster plus the log force of the walls it
    /// touches, added to the frozen remainder.
    fn local_gradient(&self, y: &[f64], frozen: &[f64], lo: f64, hi: f64, grad: &mut [f64]) {
        grad.copy_from_slice(frozen);
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                let inv = 1.0 / (y[j] - y[i]);
                grad[i] += inv;
                grad[j] -= inv;
            }
        }
        let c = y.len();
        if lo.is_finite() {
            grad[0] -= 1.0 / (y[0] - lo);
        }
        if hi.is_finite() {
            grad[c - 1] += 1.0 / (hi - y[c - 1]);
        }
    }

    fn clearance(&self, y: &[f64], lo: f64, hi: f64) -> f64 {
        let mut g = y.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        g = g.min(y[0] - lo).min(hi - y[y.len() - 1]);
        g
    }

    /// Advance the particles of one tight cluster over time `h` with small
    /// steps. Only the pair forces inside the cluster and the nearest
    /// external points (`lo`/`hi`, or ±∞) are recomputed; everything else
    /// is held at its start-of-step value.
    #[allow(clippy::too_many_arguments)]
    fn substep_cluster<R: Rng + ?Sized>(
        &self,
        y: &mut [f64],
        frozen: &[f64],
        h: f64,
        lo: f64,
        hi: f64,
        rng: &mut R,
        diag: &mut DbmDiagnostics,
    ) -> std::result::Result<(), String> {
        let c = y.len();
        let mut grad = vec![0.0; c];
        let mut trial = vec![0.0; c];
        let mut done = 0.0;
        while done < h * (1.0 - 1e-12) {
            self.local_gradient(y, frozen, lo, hi, &mut grad);
            let gap = self.clearance(y, lo, hi);
            let mut k = h - done;
            let mut halvings = 0;
            while gap < 10.0 * k.sqrt() && halvings < self.params.max_halvings {
                k *= 0.5;
                halvings += 1;
            }
            let mut retries = 0;
            loop {
                let sd = k.sqrt();
                for i in 0..c {
                    let z: f64 = if self.params.noise { StandardNormal.sample(rng) } else { 0.0 };
                    trial[i] = y[i] - 0.5 * k * self.beta * grad[i] + sd * z;
                }
                if self.clearance(&trial, lo, hi) >= GAP_FLOOR && trial.windows(2).all(|w| w[0] < w[1]) {
                    break;
                }
                diag.rejected_steps += 1;
                retries += 1;
                if retries > self.params.max_retries {
                    return Err(format!("{retries} sub-step proposals rejected at step {k:e}; cluster gap {gap:e}"));
                }
                k *= 0.5;
            }
            y.copy_from_slice(&trial);
            done += k;
            diag.substeps += 1;
            diag.smallest_step = diag.smallest_step.min(k);
            diag.smallest_gap = diag.smallest_gap.min(self.clearance(y, lo, hi));
        }
        Ok(())
    }
}

/// Euler–Maruyama integration of dx = dB − (β/2)∇E(x) dt in microscopic
/// units up to time `horizon`.
///
/// Particles joined by gaps below 10√dt (or that close to an end of J) are
/// advanced together with sub-steps halved until every gap inside the
/// group exceeds 10√(sub-step). Meanwhile only the forces inside the group
/// and from the nearest external points are updated; the rest is held at
/// its start-of-step value. All other particles take one
/// step of dt. A step whose result crosses, leaves J or brings two
/// particles within [`GAP_FLOOR`] is rejected and redrawn with fresh noise
/// at half the step.
pub fn integrate_dbm<R: Rng + ?Sized>(
    initial: &ParticleConfiguration,
    measure: &LogGasMeasure,
    horizon: f64,
    params: &DbmParams,
    rng: &mut R,
) -> Result<DbmPath> {
    if measure.beta() < 1.0 {
        return Err(DynamicsError::Domain(format!("beta = {} below 1; ordering is not guaranteed", measure.beta())));
    }
    if measure.scaling() != Scaling::Microscopic || initial.scaling() != Scaling::Microscopic {
        return Err(DynamicsError::Domain("dynamics run in microscopic coordinates".into()));
    }
    if initial.window() != measure.window() {
        return Err(DynamicsError::Domain("initial labels differ from the measure's window".into()));
    }
    if !(horizon >= 0.0) || !(params.dt > 0.0) || !(params.store_every > 0.0) {
        return Err(DynamicsError::Domain("horizon, dt and store spacing must be positive".into()));
    }
    if !measure.admissible(initial.positions()) {
        return Err(DynamicsError::Domain("initial state outside the support".into()));
    }
    let ordered = measure.interaction_eps().is_none();
    let interval = measure.interval();
    let beta = measure.beta();
    let n = measure.len();
    let window = measure.window();
    let stepper = Stepper { beta, params: *params };

    let mut x = initial.positions().to_vec();
    let mut grad = vec![0.0; n];
    let mut proposal = vec![0.0; n];
    measure.gradient(&x, &mut grad);

    let mut diag = DbmDiagnostics {
        smallest_step: f64::INFINITY,
        smallest_gap: if ordered { smallest_clearance(&x, interval) } else { f64::INFINITY },
        ..Default::default()
    };
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let mut t = 0.0;
    let mut stored = 0u64;
    let tiny = 1e-12 * horizon.max(1.0);
    let (wall_lo, wall_hi) = interval.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));

    while t < horizon - tiny {
        let target = ((stored + 1) as f64 * params.store_every).min(horizon);
        let mut h = params.dt.min(target - t);
        let mut retries = 0;
        loop {
            let sd = h.sqrt();
            for i in 0..n {
                let z: f64 = if params.noise { StandardNormal.sample(rng) } else { 0.0 };
                proposal[i] = x[i] - 0.5 * h * beta * grad[i] + sd * z;
            }
            if ordered {
                for range in tight_clusters(&x, interval, 10.0 * sd) {
                    let y = &x[range.clone()];
                    let lo = if range.start == 0 { wall_lo } else { f64::NEG_INFINITY };
                    let hi = if range.end == n { wall_hi } else { f64::INFINITY };
                    // Full gradient minus what the cluster recomputes itself.
                    let mut own = vec![0.0; y.len()];
                    stepper.local_gradient(y, &vec![0.0; y.len()], lo, hi, &mut own);
                    let frozen: Vec<f64> = range.clone().zip(&own).map(|(i, g)| grad[i] - g).collect();
                    let mut y = y.to_vec();
                    stepper
                        .substep_cluster(&mut y, &frozen, h, lo, hi, rng, &mut diag)
                        .map_err(|reason| DynamicsError::Integration { time: t, reason })?;
                    proposal[range].copy_from_slice(&y);
                }
            }
            let ok = measure.admissible(&proposal)
                && (!ordered || smallest_clearance(&proposal, interval) >= GAP_FLOOR);
            if ok {
                break;
            }
            diag.rejected_steps += 1;
            retries += 1;
            if retries > params.max_retries {
                return Err(DynamicsError::Integration {
                    time: t,
                    reason: format!(
                        "{retries} proposals rejected at step {h:e}; smallest gap {:e}",
                        smallest_clearance(&x, interval)
                    ),
                });
            }
            h *= 0.5;
        }
        std::mem::swap(&mut x, &mut proposal);
        measure.gradient(&x, &mut grad);
        t += h;
        diag.accepted_steps += 1;
        diag.smallest_step = diag.smallest_step.min(h);
        if ordered {
            if x.windows(2).any(|w| w[1] <= w[0]) {
                diag.ordering_violations += 1;
            }
            diag.smallest_gap = diag.smallest_gap.min(smallest_clearance(&x, interval));
        }
        if t >= target - tiny {
            stored += 1;
            times.push(t);
            let state = if ordered {
                ParticleConfiguration::new(x.clone(), window, Scaling::Microscopic)?
            } else {
                ParticleConfiguration::from_unsorted(x.clone(), window, Scaling::Microscopic)?
            };
            states.push(state);
        }
    }
    Ok(DbmPath { times, states, measure: measure.clone(), diagnostics: diag })
}

/// Independent paths in parallel; path `i` uses stream `i` of `seed`.
pub fn integrate_paths(
    initials: &[ParticleConfiguration],
    measure: &LogGasMeasure,
    horizon: f64,
    params: &DbmParams,
    seed: u64,
) -> Vec<Result<DbmPath>> {
    initials
        .par_iter()
        .enumerate()
        .map(|(i, init)| integrate_dbm(init, measure, horizon, params, &mut stream_rng(seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use loggas_model::PotentialModel;

    #[test]
    fn rejects_macroscopic_measure() {
        let m = LogGasMeasure::global(1.0, PotentialModel::gaussian(), 3, Scaling::Macroscopic).unwrap();
        let x = ParticleConfiguration::full(vec![-1.0, 0.0, 1.0], Scaling::Macroscopic).unwrap();
        let err = integrate_dbm(&x, &m, 1.0, &DbmParams::default(), &mut stream_rng(0, 0));
        assert!(matches!(err, Err(DynamicsError::Domain(_))));
    }

    #[test]
    fn clusters_split_on_threshold() {
        let x = [0.0, 0.05, 0.1, 1.0, 2.0, 2.01, 5.0];
        assert_eq!(tight_clusters(&x, None, 0.2), vec![0..3, 4..6]);
        assert_eq!(tight_clusters(&x, Some((-0.1, 5.05)), 0.2), vec![0..3, 4..6, 6..7]);
    }

    #[test]
    fn stores_on_the_grid() {
        let m = LogGasMeasure::global(1.0, PotentialModel::gaussian(), 3, Scaling::Microscopic).unwrap();
        let x = ParticleConfiguration::full(vec![-3.0, 0.0, 3.0], Scaling::Microscopic).unwrap();
        let p = DbmParams { dt: 0.03, store_every: 0.25, ..Default::default() };
        let path = integrate_dbm(&x, &m, 1.0, &p, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(path.len(), 5);
        for (i, t) in path.times().iter().enumerate() {
            assert!((t - 0.25 * i as f64).abs() < 1e-12);
        }
        let mut csv = Vec::new();
        path.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 5 * 3);
    }
}

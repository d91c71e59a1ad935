//! Verification suites: each draws its own data from `seed`, runs one
//! quantitative check and reports the numbers behind the verdict.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use loggas_dynamics::{build_hessian_kernel, integrate_dbm, integrate_paths, DbmParams, HessianKernel, KernelFrame};
use loggas_equilibrium::{semicircle_cdf, solve_equilibrium_density, EquilibriumDensity, SolverSettings};
use loggas_inequalities::{fuzz_sweep, gn_global_check, gn_ratio, random_lattice_function, write_fuzz_csv, LatticeKernel};
use loggas_model::{
    check_regular_potential, fmt17, stream_rng, BoundaryData, IndexWindow, ParticleConfiguration, PotentialModel,
    RegularityTolerances, Scaling,
};
use loggas_parabolic::{
    certified_floor, check_nash_decay, correlations_via_representation, delta, fit_holder_exponent,
    holder_oscillation, propagate_delta, Observable, PropagateParams, RepresentationParams, Scheme,
};
use loggas_samplers::{
    run_chains, sample_gaussian_beta_tridiagonal, sample_generalized_wigner, ChainParams, EntryLaw, LogGasMeasure,
    Symmetry, VarianceProfile,
};
use loggas_statistics::{
    gap_distribution, ks_bootstrap, ks_to_cdf, repulsion_fit, BootstrapParams, EmpiricalCdf, Ensemble, KsComparison,
    RepulsionRange, MIN_COMPARISON_SAMPLES,
};
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Verdict of one suite with the measured numbers.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub satisfied: bool,
    pub summary: String,
    pub metrics: BTreeMap<String, Value>,
    /// CSV tables (file name, contents) backing the metrics.
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
}

impl SuiteOutcome {
    fn new(suite: &str, satisfied: bool, summary: String) -> Self {
        Self { suite: suite.into(), satisfied, summary, metrics: BTreeMap::new(), tables: vec![] }
    }

    fn metric(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metrics.insert(key.into(), value.into());
        self
    }

    fn table(mut self, name: &str, csv: String) -> Self {
        self.tables.push((name.into(), csv));
        self
    }
}

fn tridiagonal_draws(n: usize, beta: f64, draws: usize, seed: u64) -> Result<Vec<ParticleConfiguration>> {
    (0..draws)
        .into_par_iter()
        .map(|d| Ok(sample_gaussian_beta_tridiagonal(n, beta, &mut stream_rng(seed, d as u64))?))
        .collect()
}

/// Classical locations of the semicircle in micro units.
fn micro_classical(n_total: usize) -> Result<Vec<f64>> {
    Ok(EquilibriumDensity::semicircle().classical_locations(n_total)?.iter().map(|g| g * n_total as f64).collect())
}

/// Local Gaussian gas of 2K + 1 particles in the middle of N with the
/// frozen points at the classical locations, and its classical start.
fn local_gas(n_total: usize, k: usize, beta: f64) -> Result<(LogGasMeasure, ParticleConfiguration)> {
    let gamma = micro_classical(n_total)?;
    let window = IndexWindow::centered(n_total as i64 / 2, k as i64)?;
    let boundary = BoundaryData::from_full(&gamma, window, Scaling::Microscopic)?;
    let measure = LogGasMeasure::local(beta, &PotentialModel::gaussian(), &boundary, window)?;
    let start =
        ParticleConfiguration::new(gamma[(window.lo - 1) as usize..window.hi as usize].to_vec(), window, Scaling::Microscopic)?;
    Ok((measure, start))
}

fn comparison_json(c: &KsComparison) -> Value {
    json!({"ks": c.ks, "ci": [c.ci.0, c.ci.1], "null_critical": c.null_critical, "sizes": [c.sizes.0, c.sizes.1]})
}

// ---------------------------------------------------------------- semicircle

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemicircleParams {
    pub n: usize,
    pub beta: f64,
    pub draws: usize,
    pub threshold: f64,
}

impl Default for SemicircleParams {
    fn default() -> Self {
        Self { n: 200, beta: 2.0, draws: 100, threshold: 0.05 }
    }
}

/// Pooled tridiagonal eigenvalues against the semicircle CDF.
pub fn semicircle(p: &SemicircleParams, seed: u64) -> Result<SuiteOutcome> {
    let draws = tridiagonal_draws(p.n, p.beta, p.draws, seed)?;
    let pooled = EmpiricalCdf::new(draws.iter().flat_map(|d| d.positions().iter().copied()).collect())?;
    let ks = ks_to_cdf(&pooled, semicircle_cdf);
    Ok(SuiteOutcome::new(
        "semicircle",
        ks < p.threshold,
        format!("KS to the semicircle {ks:.4} over {} eigenvalues (threshold {})", pooled.len(), p.threshold),
    )
    .metric("ks", ks)
    .metric("eigenvalues", pooled.len()))
}

// ----------------------------------------------------------------- repulsion

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepulsionParams {
    pub n: usize,
    pub draws: usize,
}

impl Default for RepulsionParams {
    fn default() -> Self {
        Self { n: 100, draws: 100_000 }
    }
}

/// Small-gap slopes at the central index: first gaps at β = 1 and 2 and
/// second gaps at β = 1, against β + 1 and 2β + 1.
pub fn repulsion(p: &RepulsionParams, seed: u64) -> Result<SuiteOutcome> {
    let i = p.n / 2 - 1;
    let gaps = |beta: f64, stream: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        let pairs: Vec<(f64, f64)> = (0..p.draws)
            .into_par_iter()
            .map(|d| {
                let mut rng = stream_rng(seed.wrapping_add(stream), d as u64);
                let x = sample_gaussian_beta_tridiagonal(p.n, beta, &mut rng)?.into_positions();
                Ok((x[i + 1] - x[i], x[i + 2] - x[i]))
            })
            .collect::<Result<_>>()?;
        Ok(pairs.into_iter().unzip())
    };
    let range = RepulsionRange::default();
    let (first1, second1) = gaps(1.0, 0)?;
    let (first2, _) = gaps(2.0, 1)?;
    let cases = [
        ("beta1_first", repulsion_fit(&first1, &range)?, 2.0, 0.3),
        ("beta2_first", repulsion_fit(&first2, &range)?, 3.0, 0.3),
        ("beta1_second", repulsion_fit(&second1, &range)?, 3.0, 0.4),
    ];
    let mut satisfied = true;
    let mut summary = String::new();
    let mut table = String::from("case,s,probability\n");
    let mut out_metrics = BTreeMap::new();
    for (name, fit, want, tol) in &cases {
        let ok = (fit.slope - want).abs() <= *tol;
        satisfied &= ok;
        let _ = write!(summary, "{name} {:.3} (want {want} ± {tol}{}); ", fit.slope, if ok { "" } else { ", off" });
        for (s, prob) in &fit.points {
            let _ = writeln!(table, "{name},{},{}", fmt17(*s), fmt17(*prob));
        }
        out_metrics.insert(
            name.to_string(),
            json!({"slope": fit.slope, "ci": [fit.ci.0, fit.ci.1], "range": [fit.range.0, fit.range.1],
                   "r_squared": fit.r_squared, "events": fit.events, "target": want, "tolerance": tol}),
        );
    }
    let mut out = SuiteOutcome::new("repulsion", satisfied, summary.trim_end_matches("; ").to_string())
        .metric("draws", p.draws)
        .table("repulsion_points.csv", table);
    out.metrics.extend(out_metrics);
    Ok(out)
}

// -------------------------------------------------------------- universality

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalityParams {
    pub wigner_n: usize,
    pub wigner_draws: usize,
    pub goe_draws: usize,
    pub quartic_n: usize,
    pub quartic_chains: usize,
    pub quartic_samples: usize,
    pub index_draws: usize,
    pub resamples: usize,
}

impl Default for UniversalityParams {
    fn default() -> Self {
        Self {
            wigner_n: 200,
            wigner_draws: 1000,
            goe_draws: 4000,
            quartic_n: 100,
            quartic_chains: 4,
            quartic_samples: 1000,
            index_draws: 8000,
            resamples: 400,
        }
    }
}

/// Nearest gaps at eleven bulk indices from N/4 to 3N/4, rescaled by ϱ(γ_k).
fn bulk_gaps(draws: &[ParticleConfiguration], density: &EquilibriumDensity, beta: f64) -> Result<EmpiricalCdf> {
    let n = draws[0].len();
    let step = (n / 2) / 10;
    let mut all = Vec::new();
    for j in 0..=10 {
        let (sample, _) = gap_distribution(draws, density, Ensemble::new("pooled", beta), n / 4 + j * step, 1)?;
        all.extend(sample.order(1));
    }
    Ok(EmpiricalCdf::new(all)?)
}

fn compare(a: &EmpiricalCdf, b: &EmpiricalCdf, resamples: usize, seed: u64) -> Result<KsComparison> {
    if a.len() < MIN_COMPARISON_SAMPLES || b.len() < MIN_COMPARISON_SAMPLES {
        return Err(HarnessError::Module(format!("{} and {} gaps; at least {MIN_COMPARISON_SAMPLES} needed", a.len(), b.len())));
    }
    Ok(ks_bootstrap(a, b, &BootstrapParams { resamples, level: 0.95 }, seed)?)
}

/// Bulk gap laws: GOE tridiagonal against Bernoulli Wigner, GUE tridiagonal
/// against β = 2 quartic MCMC, and index independence within GOE.
pub fn universality(p: &UniversalityParams, seed: u64) -> Result<SuiteOutcome> {
    let sc = EquilibriumDensity::semicircle();

    let goe = tridiagonal_draws(p.wigner_n, 1.0, p.goe_draws, seed)?;
    let profile = VarianceProfile::uniform(p.wigner_n)?;
    let wigner: Vec<ParticleConfiguration> = (0..p.wigner_draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = stream_rng(seed.wrapping_add(1), d as u64);
            Ok(sample_generalized_wigner(&profile, EntryLaw::Bernoulli, Symmetry::Real, &mut rng)?)
        })
        .collect::<Result<_>>()?;
    let wigner_cmp = compare(&bulk_gaps(&goe, &sc, 1.0)?, &bulk_gaps(&wigner, &sc, 1.0)?, p.resamples, seed)?;

    let gue = tridiagonal_draws(p.quartic_n, 2.0, p.goe_draws, seed.wrapping_add(2))?;
    let quartic = PotentialModel::quartic();
    let quartic_density = solve_equilibrium_density(&quartic, SolverSettings::default())?;
    let measure = LogGasMeasure::global(2.0, quartic, p.quartic_n, Scaling::Macroscopic)?;
    let start = quartic_density.classical_locations(p.quartic_n + 1)?[..p.quartic_n].to_vec();
    let chain = ChainParams { burn_in: 5000, thin: 20, samples: p.quartic_samples, ..ChainParams::default() };
    let mcmc: Vec<ParticleConfiguration> = run_chains(&measure, &start, &chain, seed.wrapping_add(3), p.quartic_chains)?
        .into_iter()
        .flat_map(|c| c.samples)
        .collect();
    let quartic_cmp =
        compare(&bulk_gaps(&gue, &sc, 2.0)?, &bulk_gaps(&mcmc, &quartic_density, 2.0)?, p.resamples, seed + 1)?;

    let index_draws = tridiagonal_draws(p.wigner_n, 1.0, p.index_draws, seed.wrapping_add(4))?;
    let at = |k: usize| -> Result<EmpiricalCdf> {
        Ok(gap_distribution(&index_draws, &sc, Ensemble::new("goe", 1.0), k, 1)?.0.cdf(1)?)
    };
    let index_cmp = compare(&at(p.wigner_n / 4)?, &at(p.wigner_n / 2)?, p.resamples, seed + 2)?;

    let pass = |c: &KsComparison| c.ks < 0.1 && c.ci.1 < 0.2;
    let satisfied = pass(&wigner_cmp) && pass(&quartic_cmp) && index_cmp.ks < 0.05;
    Ok(SuiteOutcome::new(
        "universality",
        satisfied,
        format!(
            "GOE vs Wigner KS {:.4} (CI {:.4}..{:.4}); GUE vs quartic KS {:.4} (CI {:.4}..{:.4}); k = N/4 vs N/2 KS {:.4}",
            wigner_cmp.ks, wigner_cmp.ci.0, wigner_cmp.ci.1, quartic_cmp.ks, quartic_cmp.ci.0, quartic_cmp.ci.1, index_cmp.ks
        ),
    )
    .metric("goe_vs_wigner", comparison_json(&wigner_cmp))
    .metric("gue_vs_quartic", comparison_json(&quartic_cmp))
    .metric("index_independence", comparison_json(&index_cmp)))
}

// --------------------------------------------------------------------- decay

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    pub n_total: usize,
    pub k: usize,
    pub beta: f64,
    /// Consecutive segments of one equilibrated trajectory.
    pub paths: usize,
    pub segment: f64,
    pub store_every: f64,
    pub dt: f64,
    pub burn_in: f64,
    pub tolerance: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            n_total: 1024,
            k: 64,
            beta: 2.0,
            paths: 100,
            segment: 128.0,
            store_every: 0.5,
            dt: 0.05,
            burn_in: 100.0,
            tolerance: 0.05,
        }
    }
}

/// ‖v(s)‖_∞ ≤ (sb)^{−1}‖v(0)‖₁ from a central delta, with b the floor
/// certified on each segment's kernel.
pub fn decay(p: &DecayParams, seed: u64) -> Result<SuiteOutcome> {
    let (measure, start) = local_gas(p.n_total, p.k, p.beta)?;
    let dbm = DbmParams { dt: p.dt, store_every: p.store_every, ..DbmParams::default() };
    let horizon = p.burn_in + p.paths as f64 * p.segment;
    let path = integrate_dbm(&start, &measure, horizon, &dbm, &mut stream_rng(seed, 0))?;
    let per_segment = (p.segment / p.store_every).round() as usize;
    let first = (p.burn_in / p.store_every).round() as usize;
    if first + p.paths * per_segment >= path.len() {
        return Err(HarnessError::Module("trajectory shorter than the requested segments".into()));
    }
    let propagation =
        PropagateParams { scheme: Scheme::Exponential, dt: p.store_every * (1.0 + 1e-9), ..PropagateParams::default() };
    let reports = (0..p.paths)
        .into_par_iter()
        .map(|i| {
            let lo = first + i * per_segment;
            let segment = path.segment(lo..lo + per_segment + 1)?;
            let kernel = build_hessian_kernel(&segment)?;
            let end = segment.times()[segment.len() - 1];
            let solution = propagate_delta(&kernel, p.k, 0.0, end, &propagation)?;
            let b = certified_floor(&kernel);
            Ok(check_nash_decay(&solution, &kernel, b, 1.0, f64::INFINITY, p.tolerance)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let violations: usize = reports
        .iter()
        .map(|r| r.rows.iter().filter(|row| row.s > 0.0 && row.attained > row.bound * (1.0 + p.tolerance)).count())
        .sum();
    let unmet = reports.iter().filter(|r| r.precondition_unmet).count();
    let floors: Vec<f64> = reports.iter().map(|r| r.b_floor).collect();
    let worst = reports.iter().map(|r| r.worst_ratio).fold(0.0, f64::max);
    let smallest_floor = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let mut table = String::from("segment,certified_floor,worst_ratio,satisfied\n");
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(table, "{i},{},{},{}", fmt17(r.b_floor), fmt17(r.worst_ratio), r.satisfied);
    }
    // The bound only bites once s·b > 1.
    let informative: usize = reports.iter().map(|r| r.rows.iter().filter(|row| row.bound < 1.0).count()).sum();
    Ok(SuiteOutcome::new(
        "decay",
        violations == 0 && unmet == 0,
        format!(
            "{violations} violations over {} segments ({informative} rows with bound below 1); worst attained/bound {worst:.4}; smallest certified floor {smallest_floor:.4e}",
            p.paths
        ),
    )
    .metric("violations", violations)
    .metric("segments", p.paths)
    .metric("precondition_unmet", unmet)
    .metric("worst_ratio", worst)
    .metric("smallest_floor", smallest_floor)
    .metric("informative_rows", informative)
    .metric("dbm_ordering_violations", path.diagnostics().ordering_violations)
    .table("decay_segments.csv", table))
}

// ------------------------------------------------------------ representation

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationSuiteParams {
    pub n_total: usize,
    pub k: usize,
    pub beta: f64,
    pub pairs: usize,
    pub paths: usize,
    pub chains: usize,
    pub samples: usize,
}

impl Default for RepresentationSuiteParams {
    fn default() -> Self {
        Self { n_total: 1024, k: 5, beta: 2.0, pairs: 20, paths: 200, chains: 16, samples: 4000 }
    }
}

/// c·(x_a − γ_a) + sin(x_b − γ_b) + ½d·(x_e − γ_e)².
struct Mixed {
    c: f64,
    a: usize,
    b: usize,
    d: f64,
    e: usize,
    center: Vec<f64>,
}

impl Observable for Mixed {
    fn value(&self, x: &[f64]) -> f64 {
        let y = |i: usize| x[i] - self.center[i];
        self.c * y(self.a) + y(self.b).sin() + 0.5 * self.d * y(self.e).powi(2)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let y = |i: usize| x[i] - self.center[i];
        out.fill(0.0);
        out[self.a] += self.c;
        out[self.b] += y(self.b).cos();
        out[self.e] += self.d * y(self.e);
    }
}

/// ⟨F; G⟩ by the random-walk representation against direct chains, for
/// random smooth observable pairs of the local Gaussian gas.
pub fn representation(p: &RepresentationSuiteParams, seed: u64) -> Result<SuiteOutcome> {
    let (measure, start) = local_gas(p.n_total, p.k, p.beta)?;
    let n = measure.len();
    let center = start.positions().to_vec();
    let mut rng = stream_rng(seed, u64::MAX);
    let observables: Vec<(Mixed, Mixed)> = (0..p.pairs)
        .map(|_| {
            let mut draw = || Mixed {
                c: rng.random_range(-1.0..1.0),
                a: rng.random_range(0..n),
                b: rng.random_range(0..n),
                d: rng.random_range(0.0..0.3),
                e: rng.random_range(0..n),
                center: center.clone(),
            };
            (draw(), draw())
        })
        .collect();
    let pairs: Vec<(&dyn Observable, &dyn Observable)> =
        observables.iter().map(|(f, g)| (f as &dyn Observable, g as &dyn Observable)).collect();
    let params = RepresentationParams { paths: p.paths, ..RepresentationParams::default() };
    let estimates = correlations_via_representation(&measure, start.positions(), &pairs, &params, seed)?;

    let chain = ChainParams { burn_in: 4000, thin: 10, samples: p.samples, ..ChainParams::default() };
    let chains = run_chains(&measure, start.positions(), &chain, seed.wrapping_add(1), p.chains)?;
    let mut table = String::from("pair,representation,representation_se,direct,direct_se,z\n");
    let mut agree = 0;
    let mut worst_z: f64 = 0.0;
    for (i, ((f, g), est)) in observables.iter().zip(&estimates).enumerate() {
        let per_chain: Vec<f64> = chains
            .iter()
            .map(|out| {
                let fv: Vec<f64> = out.samples.iter().map(|s| f.value(s.positions())).collect();
                let gv: Vec<f64> = out.samples.iter().map(|s| g.value(s.positions())).collect();
                let m = fv.len() as f64;
                let (mf, mg) = (fv.iter().sum::<f64>() / m, gv.iter().sum::<f64>() / m);
                fv.iter().zip(&gv).map(|(a, b)| (a - mf) * (b - mg)).sum::<f64>() / (m - 1.0)
            })
            .collect();
        let c = per_chain.len() as f64;
        let mean = per_chain.iter().sum::<f64>() / c;
        let se = (per_chain.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (c - 1.0) / c).sqrt();
        let z = (est.estimate - mean).abs() / est.std_error.hypot(se);
        if z <= 3.0 {
            agree += 1;
        }
        worst_z = worst_z.max(z);
        let _ = writeln!(
            table,
            "{i},{},{},{},{},{}",
            fmt17(est.estimate),
            fmt17(est.std_error),
            fmt17(mean),
            fmt17(se),
            fmt17(z)
        );
    }
    let needed = (p.pairs * 9).div_ceil(10);
    Ok(SuiteOutcome::new(
        "representation",
        agree >= needed,
        format!("{agree}/{} pairs within 3 combined standard errors (need {needed}); largest z {worst_z:.2}", p.pairs),
    )
    .metric("agreeing_pairs", agree)
    .metric("pairs", p.pairs)
    .metric("largest_z", worst_z)
    .metric("tau", estimates.first().map_or(0.0, |e| e.tau))
    .metric("horizon", estimates.first().map_or(0.0, |e| e.horizon))
    .table("representation_pairs.csv", table))
}

// ---------------------------------------------------------------- propagator

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorParams {
    pub k: usize,
    pub kernels: usize,
    pub horizon: f64,
    pub tolerance: f64,
}

impl Default for PropagatorParams {
    fn default() -> Self {
        Self { k: 64, kernels: 50, horizon: 3.0, tolerance: 1e-6 }
    }
}

/// Random constant kernel with B_jk ∈ [0.2, 2]/(j − k)² and W_j ∈ [0, 0.5].
fn random_frame(n: usize, seed: u64, index: u64) -> Result<KernelFrame> {
    let mut rng = stream_rng(seed, index);
    let mut b = vec![0.0; n * n];
    for j in 0..n {
        for k in j + 1..n {
            let d = (k - j) as f64;
            let v = rng.random_range(0.2..2.0) / (d * d);
            b[j * n + k] = v;
            b[k * n + j] = v;
        }
    }
    let w = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
    Ok(KernelFrame::dense(b, w)?)
}

/// Exponential-scheme propagation against a dense Padé matrix exponential.
pub fn propagator(p: &PropagatorParams, seed: u64) -> Result<SuiteOutcome> {
    let n = 2 * p.k + 1;
    let errors = (0..p.kernels)
        .into_par_iter()
        .map(|i| {
            let frame = random_frame(n, seed, i as u64)?;
            let a = frame.generator();
            let kernel = HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0])?;
            let params = PropagateParams { scheme: Scheme::Exponential, dt: 0.5, ..PropagateParams::default() };
            let sol = propagate_delta(&kernel, p.k, 0.0, p.horizon, &params)?;
            let oracle = (a * -p.horizon).exp() * DVector::from_vec(delta(n, p.k));
            let got = DVector::from_column_slice(sol.final_values());
            Ok((got - &oracle).norm() / oracle.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(SuiteOutcome::new(
        "propagator",
        worst < p.tolerance,
        format!("largest relative error {worst:.3e} over {} kernels at K = {}", p.kernels, p.k),
    )
    .metric("worst_relative_error", worst)
    .metric("kernels", p.kernels))
}

// -------------------------------------------------------------------- holder

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderParams {
    pub k: usize,
}

impl Default for HolderParams {
    fn default() -> Self {
        Self { k: 256 }
    }
}

/// Oscillation of the propagated central delta on windows of radius
/// σ^{2/3}, for σ = r^{3/2} spread over [K^{0.3}, K^{0.7}].
pub fn holder(p: &HolderParams) -> Result<SuiteOutcome> {
    let n = 2 * p.k + 1;
    let frame = KernelFrame::from_fn(n, |j, k| 1.0 / ((k - j) as f64).powi(2), vec![0.0; n])?;
    let kernel = HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0])?;
    let kf = p.k as f64;
    let (lo, hi) = (kf.powf(0.3), kf.powf(0.7));
    let sigmas: Vec<f64> =
        (1..=p.k).map(|r| (r as f64).powf(1.5)).filter(|&s| s >= lo && s <= hi).collect();
    if sigmas.len() < 3 {
        return Err(HarnessError::Module(format!("K = {} leaves fewer than three radii in range", p.k)));
    }
    // Step boundaries at every σ keep the comparison free of interpolation.
    let mut solution_times = vec![0.0];
    solution_times.extend(&sigmas);
    let propagation = PropagateParams { scheme: Scheme::Exponential, dt: 0.25, ..PropagateParams::default() };
    let sol = propagate_delta(&kernel, p.k, 0.0, sigmas[sigmas.len() - 1], &propagation)?;
    let alpha = 1.0 / 3.0;
    let osc = sigmas.iter().map(|&s| holder_oscillation(&sol, p.k, s, alpha)).collect::<std::result::Result<Vec<_>, _>>()?;
    let scaled: Vec<f64> = sigmas.iter().zip(&osc).map(|(s, o)| s * o).collect();
    let decreasing = scaled.windows(2).all(|w| w[1] < w[0]);
    let fit = fit_holder_exponent(&sigmas, &osc, alpha)?;
    let mut table = String::from("sigma,oscillation,sigma_times_oscillation\n");
    for ((s, o), so) in sigmas.iter().zip(&osc).zip(&scaled) {
        let _ = writeln!(table, "{},{},{}", fmt17(*s), fmt17(*o), fmt17(*so));
    }
    Ok(SuiteOutcome::new(
        "holder",
        decreasing && fit.exponent > 0.0,
        format!(
            "σ·osc {} over {} radii; fitted exponent {:.4}",
            if decreasing { "decreasing" } else { "not decreasing" },
            sigmas.len(),
            fit.exponent
        ),
    )
    .metric("exponent", fit.exponent)
    .metric("slope", fit.slope)
    .metric("decreasing", decreasing)
    .table("holder.csv", table))
}

// ------------------------------------------------------------------ ordering

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingParams {
    pub n: usize,
    pub beta: f64,
    pub runs: usize,
    pub horizon: f64,
    pub dt: f64,
}

impl Default for OrderingParams {
    fn default() -> Self {
        Self { n: 100, beta: 1.0, runs: 1000, horizon: 1.0, dt: 0.01 }
    }
}

/// Accepted DBM steps of the full Gaussian system stay strictly ordered.
pub fn ordering(p: &OrderingParams, seed: u64) -> Result<SuiteOutcome> {
    let measure = LogGasMeasure::global(p.beta, PotentialModel::gaussian(), p.n, Scaling::Microscopic)?;
    let start = ParticleConfiguration::full(micro_classical(p.n + 1)?[..p.n].to_vec(), Scaling::Microscopic)?;
    let initials = vec![start; p.runs];
    let dbm = DbmParams { dt: p.dt, store_every: p.horizon, ..DbmParams::default() };
    let paths = integrate_paths(&initials, &measure, p.horizon, &dbm, seed).into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    let violations: u64 = paths.iter().map(|path| path.diagnostics().ordering_violations).sum();
    let steps: u64 = paths.iter().map(|path| path.diagnostics().accepted_steps).sum();
    let smallest_gap = paths.iter().map(|path| path.diagnostics().smallest_gap).fold(f64::INFINITY, f64::min);
    Ok(SuiteOutcome::new(
        "ordering",
        violations == 0,
        format!("{violations} ordering violations over {steps} accepted steps in {} runs", p.runs),
    )
    .metric("violations", violations)
    .metric("accepted_steps", steps)
    .metric("smallest_gap", smallest_gap))
}

// ------------------------------------------------------------------------ gn

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnParams {
    pub trials: usize,
    pub invariance_trials: usize,
    pub max_len: usize,
}

impl Default for GnParams {
    fn default() -> Self {
        Self { trials: 10_000, invariance_trials: 1000, max_len: 32 }
    }
}

/// Scale and translation invariance of the Gagliardo–Nirenberg ratio, and
/// the running maximum of the global constant over random functions.
pub fn gn(p: &GnParams, seed: u64) -> Result<SuiteOutcome> {
    let deviations = (0..p.invariance_trials)
        .into_par_iter()
        .map(|t| {
            let f = random_lattice_function(seed, t, 0, p.max_len);
            if f.is_zero() {
                return Ok((0.0, 0.0));
            }
            let mut rng = stream_rng(seed.wrapping_add(1), t as u64);
            let q = rng.random_range(2.1..8.0);
            let lo = 1.0 - 2.0 / q;
            let s = lo + rng.random_range(0.01..0.99) * (2.0 - lo);
            let c = rng.random_range(0.01..50.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let shift = rng.random_range(-1000..1000);
            let r = gn_ratio(&f, q, s)?;
            let scaled = (gn_ratio(&f.scaled(c), q, s)? - r).abs() / r;
            let moved = (gn_ratio(&f.translated(shift), q, s)? - r).abs() / r;
            Ok((scaled, moved))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let scale_dev = deviations.iter().map(|d| d.0).fold(0.0, f64::max);
    let shift_dev = deviations.iter().map(|d| d.1).fold(0.0, f64::max);

    let kernel = LatticeKernel::inverse_square(1.0);
    let rows = fuzz_sweep(p.trials, seed.wrapping_add(2), -10, p.max_len, |f| {
        Ok(gn_global_check(f, &kernel, 1.0, 1.0, 1.0)?.minimal_c)
    })?;
    let blocks = 10.min(rows.len()).max(1);
    let size = rows.len().div_ceil(blocks);
    let block_max: Vec<f64> =
        rows.chunks(size.max(1)).map(|c| c.iter().map(|r| r.minimal_c).fold(0.0, f64::max)).collect();
    let half = block_max.len() / 2;
    let early = block_max[..half.max(1)].iter().copied().fold(0.0, f64::max);
    let late = block_max[half..].iter().copied().fold(0.0, f64::max);
    let running: Vec<f64> = block_max
        .iter()
        .scan(0.0, |m, &b| {
            *m = f64::max(*m, b);
            Some(*m)
        })
        .collect();
    let bounded = running.iter().all(|v| v.is_finite());
    // No growth: the later half of the sweep does not raise the maximum by
    // more than 10 %.
    let no_growth = late <= 1.1 * early;
    let invariant = scale_dev <= 1e-12 && shift_dev <= 1e-12;
    let mut csv = Vec::new();
    write_fuzz_csv(&rows, &mut csv).map_err(|e| HarnessError::Module(e.to_string()))?;
    Ok(SuiteOutcome::new(
        "gn",
        invariant && bounded && no_growth,
        format!(
            "invariance deviations {scale_dev:.2e} (scale), {shift_dev:.2e} (translation); running max {:.4} (first half {early:.4}, second half {late:.4})",
            running.last().copied().unwrap_or(0.0)
        ),
    )
    .metric("scale_deviation", scale_dev)
    .metric("translation_deviation", shift_dev)
    .metric("running_max", running.clone())
    .metric("first_half_max", early)
    .metric("second_half_max", late)
    .table("gn_fuzz.csv", String::from_utf8(csv).expect("CSV is UTF-8")))
}

// ---------------------------------------------------------------- regularity

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityParams {
    pub n_total: usize,
    pub k: usize,
    pub xi: f64,
}

impl Default for RegularityParams {
    fn default() -> Self {
        Self { n_total: 4096, k: 32, xi: 0.5 }
    }
}

/// Boundary at the exact semicircle quantiles passes every condition; the
/// outer points on one side pushed out by 10 K^ξ/N fail the derivative
/// profile.
pub fn regularity(p: &RegularityParams) -> Result<SuiteOutcome> {
    let sc = EquilibriumDensity::semicircle();
    let gamma = sc.classical_locations(p.n_total)?;
    let window = IndexWindow::centered(p.n_total as i64 / 2, p.k as i64)?;
    let check = |y: &[f64]| -> Result<loggas_model::RegularityReport> {
        let b = BoundaryData::from_full(y, window, Scaling::Macroscopic)?;
        let rho = sc.density(b.midpoint());
        Ok(check_regular_potential(&PotentialModel::gaussian(), &b, rho, p.xi, p.k, RegularityTolerances::default(), 2000)?)
    };
    let exact = check(&gamma)?;
    let shift = 10.0 * (p.k as f64).powf(p.xi) / p.n_total as f64;
    let mut moved = gamma.clone();
    for y in moved.iter_mut().skip(window.hi as usize + 1) {
        *y += shift;
    }
    let perturbed = check(&moved)?;
    Ok(SuiteOutcome::new(
        "regularity",
        exact.all_ok() && !perturbed.derivative_profile_ok,
        format!(
            "exact quantiles: length {}, profile {}, convexity {}; perturbed profile residual {:.2} ({})",
            exact.interval_length_ok,
            exact.derivative_profile_ok,
            exact.convexity_ok,
            perturbed.max_profile_residual,
            if perturbed.derivative_profile_ok { "passes" } else { "fails" }
        ),
    )
    .metric("exact", serde_json::to_value(&exact)?)
    .metric("perturbed", serde_json::to_value(&perturbed)?))
}

// --------------------------------------------------------------- dispatching

/// Run the suite named by `config`'s `suite` key, with its other keys
/// overriding the suite defaults.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutcome> {
    let seed = config.seed;
    match config.text("suite") {
        "semicircle" => {
            let d = SemicircleParams::default();
            semicircle(
                &SemicircleParams {
                    n: config.usize("n", d.n)?,
                    beta: config.float("beta", d.beta)?,
                    draws: config.usize("draws", d.draws)?,
                    threshold: config.float("tolerance", d.threshold)?,
                },
                seed,
            )
        }
        "repulsion" => {
            let d = RepulsionParams::default();
            repulsion(&RepulsionParams { n: config.usize("n", d.n)?, draws: config.usize("draws", d.draws)? }, seed)
        }
        "universality" => {
            let d = UniversalityParams::default();
            universality(
                &UniversalityParams {
                    wigner_draws: config.usize("wigner_draws", d.wigner_draws)?,
                    goe_draws: config.usize("goe_draws", d.goe_draws)?,
                    index_draws: config.usize("index_draws", d.index_draws)?,
                    quartic_chains: config.usize("chains", d.quartic_chains)?,
                    quartic_samples: config.usize("samples", d.quartic_samples)?,
                    resamples: config.usize("resamples", d.resamples)?,
                    ..d
                },
                seed,
            )
        }
        "decay" => {
            let d = DecayParams::default();
            decay(
                &DecayParams {
                    n_total: config.usize("n_total", d.n_total)?,
                    k: config.usize("k", d.k)?,
                    beta: config.float("beta", d.beta)?,
                    paths: config.usize("paths", d.paths)?,
                    segment: config.float("segment", d.segment)?,
                    store_every: config.float("store_every", d.store_every)?,
                    dt: config.float("dt", d.dt)?,
                    burn_in: config.float("burn_in", d.burn_in)?,
                    tolerance: config.float("tolerance", d.tolerance)?,
                },
                seed,
            )
        }
        "representation" => {
            let d = RepresentationSuiteParams::default();
            representation(
                &RepresentationSuiteParams {
                    n_total: config.usize("n_total", d.n_total)?,
                    k: config.usize("k", d.k)?,
                    beta: config.float("beta", d.beta)?,
                    pairs: config.usize("pairs", d.pairs)?,
                    paths: config.usize("paths", d.paths)?,
                    chains: config.usize("chains", d.chains)?,
                    samples: config.usize("samples", d.samples)?,
                },
                seed,
            )
        }
        "propagator" => {
            let d = PropagatorParams::default();
            propagator(
                &PropagatorParams {
                    k: config.usize("k", d.k)?,
                    kernels: config.usize("kernels", d.kernels)?,
                    horizon: config.float("horizon", d.horizon)?,
                    tolerance: config.float("tolerance", d.tolerance)?,
                },
                seed,
            )
        }
        "holder" => holder(&HolderParams { k: config.usize("k", HolderParams::default().k)? }),
        "ordering" => {
            let d = OrderingParams::default();
            ordering(
                &OrderingParams {
                    n: config.usize("n", d.n)?,
                    beta: config.float("beta", d.beta)?,
                    runs: config.usize("runs", d.runs)?,
                    horizon: config.float("horizon", d.horizon)?,
                    dt: config.float("dt", d.dt)?,
                },
                seed,
            )
        }
        "gn" => {
            let d = GnParams::default();
            gn(&GnParams { trials: config.usize("trials", d.trials)?, ..d }, seed)
        }
        "regularity" => {
            let d = RegularityParams::default();
            regularity(&RegularityParams {
                n_total: config.usize("n_total", d.n_total)?,
                k: config.usize("k", d.k)?,
                xi: config.float("xi", d.xi)?,
            })
        }
        other => Err(HarnessError::config("verify.suite", format!("unknown suite `{other}`"))),
    }
}

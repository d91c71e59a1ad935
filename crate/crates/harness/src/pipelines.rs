//! Runs one experiment end to end: pipeline, artifacts, manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use loggas_dynamics::{build_hessian_kernel, integrate_dbm, integrate_paths, DbmParams, HessianKernel, KernelFrame};
use loggas_equilibrium::{semicircle_cdf, solve_equilibrium_density, EquilibriumDensity, SolverSettings};
use loggas_model::{stream_rng, BoundaryData, IndexWindow, ParticleConfiguration, PotentialModel, Scaling};
use loggas_parabolic::{certified_floor, check_nash_decay, propagate_delta, PropagateParams, Scheme};
use loggas_samplers::{
    run_chains, sample_gaussian_beta_tridiagonal, sample_generalized_wigner, ChainParams, EntryLaw, LogGasMeasure,
    Symmetry, VarianceProfile,
};
use loggas_statistics::{
    gap_distribution, ks_bootstrap, ks_to_cdf, level_repulsion_exponent, occupancy_probability, BootstrapParams,
    EmpiricalCdf, Ensemble, GapOrder, RepulsionRange, StatReport,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::{versions, ArtifactWriter, Manifest, CONFIG_FILE};
use crate::config::{ExperimentConfig, Kind};
use crate::error::{HarnessError, Result};
use crate::suites::run_suite;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "LOGGAS_OUTPUT_ROOT";

/// Output root from the environment, else `./loggas-output`.
pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map_or_else(|| PathBuf::from("loggas-output"), PathBuf::from)
}

/// What a finished run left behind.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl ExperimentRecord {
    pub fn summary(&self) -> &Value {
        &self.manifest.summary
    }

    /// Acceptance outcome; runs without a check count as passed.
    pub fn passed(&self) -> bool {
        self.manifest.passed.unwrap_or(true)
    }
}

/// Directory a config writes to under `root`.
pub fn output_dir(config: &ExperimentConfig, root: &Path) -> PathBuf {
    match &config.output {
        Some(o) => root.join(o),
        None => root.join(format!("{}-{}", config.kind, &config.hash()[..12])),
    }
}

/// First error message and number of failed tasks.
type Failures = Option<(String, usize)>;

struct Outcome {
    summary: Value,
    passed: Option<bool>,
    failures: Failures,
}

impl Outcome {
    fn ok(summary: Value, passed: Option<bool>) -> Self {
        Self { summary, passed, failures: None }
    }
}

/// Run `config`, writing into its output directory under `root`.
pub fn run_experiment(config: &ExperimentConfig, root: &Path) -> Result<ExperimentRecord> {
    run_into(config, &output_dir(config, root))
}

pub(crate) fn run_into(config: &ExperimentConfig, dir: &Path) -> Result<ExperimentRecord> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Module(format!("worker pool: {e}")))?;
    let mut out = ArtifactWriter::create(dir)?;
    out.write(CONFIG_FILE, config.to_text())?;
    let outcome = pool.install(|| match config.kind {
        Kind::Sample => sample(config, &mut out),
        Kind::Dbm => dbm(config, &mut out),
        Kind::Parabolic => parabolic(config, &mut out),
        Kind::Stats => stats(config, &mut out),
        Kind::Verify => verify(config, &mut out),
    })?;
    let manifest = Manifest {
        kind: config.kind,
        config_hash: config.hash(),
        config_file: CONFIG_FILE.into(),
        seed: config.seed,
        workers: config.workers,
        versions: versions(),
        wall_time_s: started.elapsed().as_secs_f64(),
        files: out.files().clone(),
        summary: outcome.summary,
        passed: outcome.passed,
    };
    manifest.write(dir)?;
    if let Some((first_error, failed)) = outcome.failures {
        return Err(HarnessError::Partial { failed, first_error, salvaged: out.names() });
    }
    Ok(ExperimentRecord { dir: dir.to_path_buf(), manifest })
}

/// Keep the successes in order, count the failures.
fn split<T>(results: Vec<Result<T>>) -> (Vec<(usize, T)>, Failures) {
    let mut kept = Vec::new();
    let mut first = None;
    let mut failed = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => kept.push((i, v)),
            Err(e) => {
                failed += 1;
                first.get_or_insert_with(|| format!("task {i}: {e}"));
            }
        }
    }
    (kept, first.map(|e| (e, failed)))
}

fn potential(name: &str) -> PotentialModel {
    if name == "quartic" {
        PotentialModel::quartic()
    } else {
        PotentialModel::gaussian()
    }
}

fn density_of(name: &str) -> Result<EquilibriumDensity> {
    Ok(match name {
        "quartic" => solve_equilibrium_density(&PotentialModel::quartic(), SolverSettings::default())?,
        _ => EquilibriumDensity::semicircle(),
    })
}

fn draw_configurations(config: &ExperimentConfig, draws: usize) -> Result<Vec<Result<ParticleConfiguration>>> {
    let n = config.usize("n", 200)?;
    let beta = config.float("beta", 2.0)?;
    let seed = config.seed;
    Ok(match config.text("ensemble") {
        "wigner" => {
            let symmetry = if beta == 2.0 { Symmetry::Complex } else { Symmetry::Real };
            let law = match config.text("entries") {
                "bernoulli" => EntryLaw::Bernoulli,
                "uniform" => EntryLaw::Uniform,
                _ => EntryLaw::Gaussian,
            };
            let profile = VarianceProfile::uniform(n)?;
            (0..draws)
                .into_par_iter()
                .map(|d| Ok(sample_generalized_wigner(&profile, law, symmetry, &mut stream_rng(seed, d as u64))?))
                .collect()
        }
        "mcmc" => {
            let name = config.text("potential");
            let density = density_of(name)?;
            let measure = LogGasMeasure::global(beta, potential(name), n, Scaling::Macroscopic)?;
            let start = density.classical_locations(n + 1)?[..n].to_vec();
            // A fixed chain count keeps the draws independent of `workers`.
            let chains = draws.clamp(1, 4);
            let params = ChainParams {
                burn_in: config.usize("burn_in", 2000)?,
                thin: config.usize("thin", 10)?,
                samples: draws.div_ceil(chains),
                ..ChainParams::default()
            };
            run_chains(&measure, &start, &params, seed, chains)?
                .into_iter()
                .flat_map(|c| c.samples)
                .take(draws)
                .map(Ok)
                .collect()
        }
        _ => (0..draws)
            .into_par_iter()
            .map(|d| Ok(sample_gaussian_beta_tridiagonal(n, beta, &mut stream_rng(seed, d as u64))?))
            .collect(),
    })
}

fn sample(config: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let draws = config.usize("draws", 100)?;
    let (kept, failures) = split(draw_configurations(config, draws)?);
    for (i, c) in &kept {
        out.write(&format!("draws/draw_{i:05}.csv"), c.to_csv_string())?;
    }
    let summary = json!({
        "ensemble": config.text("ensemble"),
        "n": config.usize("n", 200)?,
        "beta": config.float("beta", 2.0)?,
        "draws_written": kept.len(),
    });
    Ok(Outcome { summary, passed: None, failures })
}

/// Semicircle classical locations of an N-particle system in micro units.
fn micro_classical(n_total: usize) -> Result<Vec<f64>> {
    Ok(EquilibriumDensity::semicircle().classical_locations(n_total)?.iter().map(|g| g * n_total as f64).collect())
}

fn local_gas(n_total: usize, k: usize, beta: f64) -> Result<(LogGasMeasure, ParticleConfiguration)> {
    let gamma = micro_classical(n_total)?;
    let window = IndexWindow::centered(n_total as i64 / 2, k as i64)?;
    let boundary = BoundaryData::from_full(&gamma, window, Scaling::Microscopic)?;
    let measure = LogGasMeasure::local(beta, &PotentialModel::gaussian(), &boundary, window)?;
    let start = ParticleConfiguration::new(
        gamma[(window.lo - 1) as usize..window.hi as usize].to_vec(),
        window,
        Scaling::Microscopic,
    )?;
    Ok((measure, start))
}

fn dbm_setup(config: &ExperimentConfig) -> Result<(LogGasMeasure, ParticleConfiguration)> {
    let n_total = config.usize("n_total", 1024)?;
    let beta = config.float("beta", 2.0)?;
    if config.text("measure") == "global" {
        let measure = LogGasMeasure::global(beta, PotentialModel::gaussian(), n_total, Scaling::Microscopic)?;
        let start = ParticleConfiguration::full(micro_classical(n_total + 1)?[..n_total].to_vec(), Scaling::Microscopic)?;
        Ok((measure, start))
    } else {
        local_gas(n_total, config.usize("k", 16)?, beta)
    }
}

fn dbm(config: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let (measure, start) = dbm_setup(config)?;
    let params = DbmParams {
        dt: config.float("dt", 0.01)?,
        store_every: config.float("store_every", 0.1)?,
        ..DbmParams::default()
    };
    let paths = config.usize("paths", 4)?;
    let initials = vec![start; paths];
    let results = integrate_paths(&initials, &measure, config.float("horizon", 10.0)?, &params, config.seed);
    let (kept, failures) = split(results.into_iter().map(|r| r.map_err(HarnessError::from)).collect());
    let mut diagnostics = Vec::new();
    for (i, path) in &kept {
        let mut csv = Vec::new();
        path.write_csv(&mut csv).map_err(|e| HarnessError::io(out.root().join("paths"), e))?;
        out.write(&format!("paths/path_{i:03}.csv"), csv)?;
        diagnostics.push(serde_json::to_value(path.diagnostics())?);
    }
    let violations: u64 = kept.iter().map(|(_, p)| p.diagnostics().ordering_violations).sum();
    let summary = json!({
        "paths_written": kept.len(),
        "particles": measure.len(),
        "ordering_violations": violations,
        "diagnostics": diagnostics,
    });
    Ok(Outcome { summary, passed: Some(violations == 0), failures })
}

fn parabolic(config: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let k = config.usize("k", 32)?;
    let horizon = config.float("horizon", 10.0)?;
    let store_every = config.float("store_every", 0.5)?;
    let kernel = if config.text("kernel") == "dbm" {
        let (measure, start) = local_gas(config.usize("n_total", 1024)?, k, config.float("beta", 2.0)?)?;
        let params = DbmParams { dt: config.float("dbm_dt", 0.05)?, store_every, ..DbmParams::default() };
        let path = integrate_dbm(&start, &measure, horizon, &params, &mut stream_rng(config.seed, 0))?;
        build_hessian_kernel(&path)?
    } else {
        // W_j = 1/d_j, d_j the distance past the window edge, so both floors hold with b = 1.
        let n = 2 * k + 1;
        let w = (0..n).map(|j| 1.0 / (j.min(n - 1 - j) + 1) as f64).collect();
        let frame = KernelFrame::from_fn(n, |i, j| 1.0 / ((j - i) as f64).powi(2), w)?;
        HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0])?
    };
    let scheme = if config.text("scheme") == "implicit_euler" { Scheme::ImplicitEuler } else { Scheme::Exponential };
    let params = PropagateParams { scheme, dt: config.float("dt", 0.25)?, ..PropagateParams::default() };
    let end = kernel.times().last().copied().filter(|&t| t > 0.0 && t < horizon).unwrap_or(horizon);
    let solution = propagate_delta(&kernel, k, 0.0, end, &params)?;
    let mut csv = Vec::new();
    solution.write_csv(&mut csv).map_err(|e| HarnessError::io(out.root().join("solution.csv"), e))?;
    out.write("solution.csv", csv)?;
    let floor = certified_floor(&kernel);
    let nash = check_nash_decay(&solution, &kernel, floor, 1.0, f64::INFINITY, 0.05)?;
    out.write_json("nash.json", &nash)?;
    let summary = json!({
        "sites": 2 * k + 1,
        "horizon": end,
        "certified_floor": floor,
        "worst_ratio": nash.worst_ratio,
        "nash_satisfied": nash.satisfied,
        "precondition_unmet": nash.precondition_unmet,
    });
    Ok(Outcome::ok(summary, Some(nash.satisfied && !nash.precondition_unmet)))
}

fn stats(config: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let n = config.usize("n", 200)?;
    let beta = config.float("beta", 2.0)?;
    let draws = config.usize("draws", 1000)?;
    let order = config.usize("order", 1)?;
    let k = match config.usize("k", 0)? {
        0 => n / 2,
        k => k,
    };
    let seed = config.seed;
    let samples: Vec<ParticleConfiguration> = (0..draws)
        .into_par_iter()
        .map(|d| Ok(sample_gaussian_beta_tridiagonal(n, beta, &mut stream_rng(seed, d as u64))?))
        .collect::<Result<_>>()?;
    let sc = EquilibriumDensity::semicircle();
    let ensemble = Ensemble::new(if beta == 1.0 { "goe" } else { "beta" }, beta);
    let estimator = config.text("estimator");
    let report = match estimator {
        "semicircle" => {
            let pooled = EmpiricalCdf::new(samples.iter().flat_map(|s| s.positions().iter().copied()).collect())?;
            out.write("cdf.csv", pooled.to_csv())?;
            StatReport::new("semicircle_ks", ks_to_cdf(&pooled, semicircle_cdf), pooled.len())
        }
        "repulsion" => {
            let gap_order = if order == 2 { GapOrder::Second } else { GapOrder::First };
            let fit = level_repulsion_exponent(&samples, k as i64, gap_order, &RepulsionRange::default())?;
            out.write_json("fit.json", &fit)?;
            StatReport::new("repulsion_exponent", fit.slope, fit.sample_size).with_ci(fit.ci)
        }
        "universality" => {
            let k2 = match config.usize("k2", 0)? {
                0 => n / 4,
                k2 => k2,
            };
            let (_, a) = gap_distribution(&samples, &sc, ensemble.clone(), k, order)?;
            let (_, b) = gap_distribution(&samples, &sc, ensemble, k2, order)?;
            out.write("cdf.csv", a.to_csv())?;
            out.write("cdf_k2.csv", b.to_csv())?;
            let params = BootstrapParams { resamples: config.usize("resamples", 400)?, ..BootstrapParams::default() };
            let c = ks_bootstrap(&a, &b, &params, seed)?;
            StatReport::new("gap_ks", c.ks, a.len().min(b.len()))
                .with_ci(c.ci)
                .param("k2", k2)
                .param("null_critical", c.null_critical)
        }
        "level_count" => {
            let delta = (n as f64).powf(-1.0 - config.float("alpha", 0.2)?);
            let p = occupancy_probability(&samples, 0.0, delta, 1);
            StatReport::new("occupancy_probability", p, samples.len()).param("delta", delta)
        }
        _ => {
            let (sample, cdf) = gap_distribution(&samples, &sc, ensemble, k, order)?;
            out.write("cdf.csv", cdf.to_csv())?;
            StatReport::new("mean_rescaled_gap", sample.mean(order), cdf.len())
        }
    }
    .param("n", n)
    .param("beta", beta)
    .param("k", k)
    .param("order", order)
    .with_seed(seed);
    out.write("report.json", report.to_json() + "\n")?;
    Ok(Outcome::ok(serde_json::to_value(&report)?, None))
}

fn verify(config: &ExperimentConfig, out: &mut ArtifactWriter) -> Result<Outcome> {
    let outcome = run_suite(config)?;
    for (name, csv) in &outcome.tables {
        out.write(name, csv)?;
    }
    out.write_json("summary.json", &outcome)?;
    Ok(Outcome::ok(serde_json::to_value(&outcome)?, Some(outcome.satisfied)))
}

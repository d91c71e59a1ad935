use loggas_dynamics::{integrate_dbm, integrate_paths, DbmParams};
use loggas_model::{stream_rng, ParticleConfiguration, PotentialModel, Scaling};
use loggas_samplers::{sample_gaussian_beta_tridiagonal, LogGasMeasure};
use proptest::prelude::*;

fn ks_two(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
}

#[test]
fn one_particle_is_ornstein_uhlenbeck() {
    // E = x²/4, drift −βx/4: stationary variance 2/β.
    let beta = 1.0;
    let m = LogGasMeasure::global(beta, PotentialModel::gaussian(), 1, Scaling::Microscopic).unwrap();
    let x0 = ParticleConfiguration::full(vec![0.0], Scaling::Microscopic).unwrap();
    let runs = 2000;
    let horizon = 40.0;
    let params = DbmParams { dt: 0.01, store_every: horizon, ..Default::default() };
    let finals: Vec<f64> = integrate_paths(&vec![x0; runs], &m, horizon, &params, 7)
        .into_iter()
        .map(|p| p.unwrap().final_state().positions()[0])
        .collect();
    let (_, var) = mean_var(&finals);
    let exact = 2.0 / beta * (1.0 - (-0.5 * beta * horizon).exp());
    // Standard error of a Gaussian sample variance.
    let se = exact * (2.0 / (runs as f64 - 1.0)).sqrt();
    assert!((var - exact).abs() < 3.0 * se, "{var} vs {exact} ± {se}");
}

#[test]
fn drift_only_flow_keeps_symmetry() {
    let m = LogGasMeasure::global(2.0, PotentialModel::gaussian(), 3, Scaling::Microscopic).unwrap();
    let x0 = ParticleConfiguration::full(vec![-1.5, 0.0, 1.5], Scaling::Microscopic).unwrap();
    let params = DbmParams { dt: 0.01, store_every: 0.5, noise: false, ..Default::default() };
    let path = integrate_dbm(&x0, &m, 20.0, &params, &mut stream_rng(0, 0)).unwrap();
    for s in path.states() {
        let x = s.positions();
        assert!((x[0] + x[2]).abs() < 1e-12 && x[1].abs() < 1e-12, "{x:?}");
    }
    // Gaps open toward the repulsion/confinement balance.
    assert!(path.final_state().positions()[2] > 1.5);
}

#[test]
fn goe_gap_law_is_stationary() {
    let n = 100;
    let beta = 1.0;
    let runs = 600;
    let mut rng = stream_rng(21, 0);
    let initials: Vec<ParticleConfiguration> = (0..runs)
        .map(|_| sample_gaussian_beta_tridiagonal(n, beta, &mut rng).unwrap().micro_rescale(n).unwrap())
        .collect();
    let m = LogGasMeasure::global(beta, PotentialModel::gaussian(), n, Scaling::Microscopic).unwrap();
    let params = DbmParams { store_every: 1.0, ..Default::default() };
    let paths = integrate_paths(&initials, &m, 1.0, &params, 22);
    let bulk = 40..60;
    let mut before = Vec::new();
    let mut after = Vec::new();
    for (init, path) in initials.iter().zip(paths) {
        let path = path.unwrap();
        assert_eq!(path.diagnostics().ordering_violations, 0);
        let (x0, x1) = (init.positions(), path.final_state().positions());
        for k in bulk.clone() {
            before.push(x0[k + 1] - x0[k]);
            after.push(x1[k + 1] - x1[k]);
        }
    }
    let d = ks_two(before.clone(), after.clone());
    assert!(d < 0.05, "KS {d}");
    // Gap means agree within 3 MC sigma (runs are independent).
    let per_run = |g: &[f64]| g.chunks(bulk.len()).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect::<Vec<_>>();
    let (m0, v0) = mean_var(&per_run(&before));
    let (m1, v1) = mean_var(&per_run(&after));
    let se = ((v0 + v1) / runs as f64).sqrt();
    assert!((m0 - m1).abs() < 3.0 * se, "{m0} vs {m1} ± {se}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn accepted_steps_stay_ordered(seed in 0u64..1000, spread in 0.2f64..3.0, n in 2usize..12) {
        let m = LogGasMeasure::global(1.0, PotentialModel::quartic(), n, Scaling::Microscopic).unwrap();
        let x: Vec<f64> = (0..n).map(|i| spread * (i as f64 - 0.5 * n as f64)).collect();
        let x0 = ParticleConfiguration::full(x, Scaling::Microscopic).unwrap();
        let path = integrate_dbm(&x0, &m, 2.0, &DbmParams::default(), &mut stream_rng(seed, 0)).unwrap();
        prop_assert_eq!(path.diagnostics().ordering_violations, 0);
        for s in path.states() {
            prop_assert!(s.positions().windows(2).all(|w| w[0] < w[1]));
        }
    }
}

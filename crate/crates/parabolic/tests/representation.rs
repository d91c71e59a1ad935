use loggas_dynamics::DbmParams;
use loggas_equilibrium::EquilibriumDensity;
use loggas_model::{stream_rng, BoundaryData, IndexWindow, PotentialModel, Scaling};
use loggas_parabolic::{
    correlation_via_representation, correlations_via_representation, LinearObservable, Observable,
    RepresentationParams,
};
use loggas_samplers::{run_chains, ChainParams, LogGasMeasure};
use rand::Rng;

/// c·x_a + sin(x_b) + ½ d·x_e², a smooth observable with bounded-below
/// curvature on the scales used here.
struct Mixed {
    c: f64,
    a: usize,
    b: usize,
    d: f64,
    e: usize,
}

impl Observable for Mixed {
    fn value(&self, x: &[f64]) -> f64 {
        self.c * x[self.a] + x[self.b].sin() + 0.5 * self.d * x[self.e] * x[self.e]
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[self.a] += self.c;
        out[self.b] += x[self.b].cos();
        out[self.e] += self.d * x[self.e];
    }
}

fn local_gas(k_half: i64) -> (LogGasMeasure, Vec<f64>) {
    let n = 1024;
    let gamma: Vec<f64> =
        EquilibriumDensity::semicircle().classical_locations(n).unwrap().iter().map(|g| g * n as f64).collect();
    let center = n as i64 / 2;
    let window = IndexWindow::centered(center, k_half).unwrap();
    let boundary = BoundaryData::from_full(&gamma, window, Scaling::Microscopic).unwrap();
    let measure = LogGasMeasure::local(2.0, &PotentialModel::gaussian(), &boundary, window).unwrap();
    let start = gamma[(window.lo - 1) as usize..window.hi as usize].to_vec();
    (measure, start)
}

#[test]
fn constant_observable_has_zero_covariance() {
    let m = LogGasMeasure::global(2.0, PotentialModel::gaussian(), 3, Scaling::Microscopic).unwrap();
    let f = LinearObservable { weights: vec![0.0; 3] };
    let g = LinearObservable { weights: vec![1.0, 0.0, -1.0] };
    let params = RepresentationParams { paths: 4, horizon: Some(1.0), ..Default::default() };
    let r = correlation_via_representation(&m, &[-2.0, 0.0, 2.0], &f, &g, &params, 1).unwrap();
    assert_eq!(r.estimate, 0.0);
    assert_eq!(r.direct, 0.0);
}

#[test]
fn zero_horizon_gives_zero_on_both_sides() {
    let m = LogGasMeasure::global(2.0, PotentialModel::gaussian(), 3, Scaling::Microscopic).unwrap();
    let f = LinearObservable { weights: vec![1.0, 2.0, 0.5] };
    let g = LinearObservable { weights: vec![0.0, 1.0, -1.0] };
    let params = RepresentationParams { paths: 4, horizon: Some(0.0), ..Default::default() };
    let r = correlation_via_representation(&m, &[-2.0, 0.0, 2.0], &f, &g, &params, 2).unwrap();
    assert_eq!(r.estimate, 0.0);
    assert_eq!(r.direct, 0.0);
}

#[test]
fn finite_horizon_identity_for_three_particles() {
    let m = LogGasMeasure::global(2.0, PotentialModel::gaussian(), 3, Scaling::Microscopic).unwrap();
    let mut rng = stream_rng(99, 0);
    let observables: Vec<(Mixed, Mixed)> = (0..20)
        .map(|_| {
            let mut draw = || Mixed {
                c: rng.random_range(-1.0..1.0),
                a: rng.random_range(0..3),
                b: rng.random_range(0..3),
                d: rng.random_range(0.0..0.3),
                e: rng.random_range(0..3),
            };
            (draw(), draw())
        })
        .collect();
    let pairs: Vec<(&dyn Observable, &dyn Observable)> =
        observables.iter().map(|(f, g)| (f as &dyn Observable, g as &dyn Observable)).collect();
    let params = RepresentationParams {
        paths: 2000,
        horizon: Some(2.0),
        dbm: DbmParams { dt: 0.005, store_every: 0.05, ..Default::default() },
        ..Default::default()
    };
    let out = correlations_via_representation(&m, &[-2.0, 0.0, 2.0], &pairs, &params, 5).unwrap();
    for (i, r) in out.iter().enumerate() {
        let z = (r.estimate - r.direct).abs() / r.combined_std_error();
        assert!(z < 3.0, "pair {i}: {} vs {} ({z:.2} σ)", r.estimate, r.direct);
    }
}

#[test]
fn local_gas_covariance_matches_direct_chains() {
    let (m, start) = local_gas(5);
    let n = m.len();
    let mut fw = vec![0.0; n];
    fw[0] = 1.0;
    let mut gw = vec![0.0; n];
    gw[1] = 1.0;
    gw[0] = -1.0;
    let f = LinearObservable { weights: fw };
    let g = LinearObservable { weights: gw };
    let params = RepresentationParams { paths: 200, ..Default::default() };
    let r = correlation_via_representation(&m, &start, &f, &g, &params, 8).unwrap();

    // Direct covariance: one estimate per independent chain.
    let chain = ChainParams { burn_in: 4000, thin: 10, samples: 4000, ..Default::default() };
    let per_chain: Vec<f64> = run_chains(&m, &start, &chain, 21, 16)
        .unwrap()
        .iter()
        .map(|out| {
            let fv: Vec<f64> = out.samples.iter().map(|s| f.value(s.positions())).collect();
            let gv: Vec<f64> = out.samples.iter().map(|s| g.value(s.positions())).collect();
            let k = fv.len() as f64;
            let (mf, mg) = (fv.iter().sum::<f64>() / k, gv.iter().sum::<f64>() / k);
            fv.iter().zip(&gv).map(|(a, b)| (a - mf) * (b - mg)).sum::<f64>() / (k - 1.0)
        })
        .collect();
    let c = per_chain.len() as f64;
    let mean = per_chain.iter().sum::<f64>() / c;
    let se = (per_chain.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (c - 1.0) / c).sqrt();
    let z = (r.estimate - mean).abs() / r.std_error.hypot(se);
    assert!(z < 3.0, "estimate {} ± {}, direct {mean} ± {se}: {z:.2} σ", r.estimate, r.std_error);
}

mod common;

use loggas_dynamics::{
    build_hessian_kernel, check_regularity_point, check_strong_regularity, integrate_dbm, DbmParams, DbmPath,
    HessianKernel, KernelFrame,
};
use loggas_model::{stream_rng, IndexWindow, ParticleConfiguration, PotentialModel, Scaling};
use loggas_samplers::LogGasMeasure;

fn frozen_path(x: Vec<f64>, times: usize, measure: LogGasMeasure) -> DbmPath {
    let conf = ParticleConfiguration::new(x, measure.window(), Scaling::Microscopic).unwrap();
    DbmPath::from_states((0..times).map(|t| t as f64).collect(), vec![conf; times], measure).unwrap()
}

#[test]
fn equidistant_path_gives_inverse_square_couplings() {
    let n = 9;
    let flat = PotentialModel::polynomial(vec![0.0], 0.0);
    let m = LogGasMeasure::global(1.0, flat, n, Scaling::Microscopic).unwrap();
    let path = frozen_path((1..=n).map(|j| j as f64).collect(), 4, m);
    let k = build_hessian_kernel(&path).unwrap();
    for s in [0.0, 1.5, 3.0] {
        for j in 0..n {
            // No external points and V'' = 0.
            assert_eq!(k.w(s, j), 0.0);
            for l in 0..n {
                if l != j {
                    let d = j as f64 - l as f64;
                    assert!((k.b(s, j, l) - 1.0 / (d * d)).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn kernel_is_symmetric_and_nonnegative_along_a_path() {
    let gas = common::local_gas(400, 8, 2.0);
    let p = DbmParams { store_every: 0.5, ..Default::default() };
    let path = integrate_dbm(&gas.start, &gas.measure, 10.0, &p, &mut stream_rng(3, 0)).unwrap();
    let k = build_hessian_kernel(&path).unwrap();
    for i in 0..k.times().len() {
        let f = k.frame(i);
        for j in 0..f.n() {
            assert!(f.w(j) > 0.0);
            for l in 0..f.n() {
                assert_eq!(f.b(j, l), f.b(l, j));
                assert!(f.b(j, l) >= 0.0);
            }
        }
    }
}

#[test]
fn convexity_floor_along_conditioned_path() {
    // ⟨v, ∇²E v⟩ ≥ (c/K)|v|² with boundary at the classical locations.
    for (k_half, beta) in [(16i64, 1.0), (64, 2.0)] {
        let gas = common::local_gas(1024, k_half, beta);
        let p = DbmParams { store_every: 2.0, ..Default::default() };
        let path = integrate_dbm(&gas.start, &gas.measure, 10.0, &p, &mut stream_rng(4, k_half as u64)).unwrap();
        let kernel = build_hessian_kernel(&path).unwrap();
        for i in 0..kernel.times().len() {
            let lambda = kernel.frame(i).smallest_eigenvalue() / beta;
            assert!(lambda * k_half as f64 > 0.2, "K = {k_half}: λ_min = {lambda}");
        }
    }
}

#[test]
fn constant_kernel_regularity_grows_at_most_logarithmically() {
    let mut values = Vec::new();
    for k_half in [16usize, 32, 64, 128] {
        let n = 2 * k_half + 1;
        let frame = KernelFrame::from_fn(n, |i, j| 1.0 / ((i as f64 - j as f64).powi(2)), vec![0.0; n]).unwrap();
        let grid: Vec<f64> = (0..=40).map(|t| t as f64).collect();
        let kernel = HessianKernel::constant(IndexWindow::full(n), frame, grid).unwrap();
        let v = check_regularity_point(&kernel, k_half, 20.0).unwrap();
        // (1/M)ΣΣ over a block of 2M+1 sites is at most (2 + 1/M)·2ζ(2).
        assert!(v <= 3.0 * std::f64::consts::PI.powi(2) / 3.0 * (k_half as f64).ln(), "K = {k_half}: {v}");
        values.push(v);
    }
    assert!(values.windows(2).all(|w| w[1] < w[0] * 1.5));
}

#[test]
fn single_spike_in_time() {
    let n = 21;
    let spike = |h: f64| {
        KernelFrame::from_fn(n, |i, j| if i.min(j) == 10 && i.abs_diff(j) == 1 { h } else { 0.0 }, vec![0.0; n])
            .unwrap()
    };
    let grid = vec![0.0, 4.0, 5.0, 6.0, 10.0];
    let frames = vec![spike(0.0), spike(0.0), spike(1.0), spike(0.0), spike(0.0)];
    let kernel = HessianKernel::new(IndexWindow::full(n), grid, frames).unwrap();
    // Triangle of unit area at s = 5, counted once for (i, j) and once for
    // (j, i); every radius sees it and M = 1 weighs it most. The largest
    // ratio comes from s = 4: 2/(1 + 6).
    let v = check_regularity_point(&kernel, 10, 10.0).unwrap();
    assert!((v - 2.0 / 7.0).abs() < 1e-12, "{v}");
}

#[test]
fn zero_kernel_is_regular_everywhere() {
    let n = 11;
    let frame = KernelFrame::dense(vec![0.0; n * n], vec![0.0; n]).unwrap();
    let kernel = HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0, 1.0, 2.0]).unwrap();
    assert_eq!(check_regularity_point(&kernel, 5, 1.0).unwrap(), 0.0);
    assert_eq!(check_strong_regularity(&kernel, 5, 2.0, 1.0).unwrap(), 0.0);
}

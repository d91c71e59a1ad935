use loggas_dynamics::{HessianKernel, KernelFrame};
use loggas_model::{stream_rng, IndexWindow};
use loggas_parabolic::{delta, lp_norm, propagate, propagate_delta, propagate_many, PropagateParams, Scheme};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn constant(frame: KernelFrame) -> HessianKernel {
    let n = frame.n();
    HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0]).unwrap()
}

fn random_frame(n: usize, seed: u64) -> KernelFrame {
    let mut rng = stream_rng(seed, 0);
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
    KernelFrame::dense(b, w).unwrap()
}

#[test]
fn zero_kernel_leaves_data_unchanged() {
    let n = 9;
    let k = constant(KernelFrame::dense(vec![0.0; n * n], vec![0.0; n]).unwrap());
    let v0: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
    for scheme in [Scheme::ImplicitEuler, Scheme::Exponential] {
        let p = PropagateParams { scheme, dt: 0.3, ..Default::default() };
        let sol = propagate(&k, &v0, 0.0, 5.0, &p).unwrap();
        assert_eq!(sol.final_values(), v0.as_slice());
    }
}

#[test]
fn diagonal_weights_decay_exponentially() {
    let n = 5;
    let c = 0.7;
    let k = constant(KernelFrame::dense(vec![0.0; n * n], vec![c; n]).unwrap());
    let v0 = vec![1.0, -2.0, 0.5, 3.0, 0.0];
    let p = PropagateParams { scheme: Scheme::Exponential, dt: 0.25, ..Default::default() };
    let sol = propagate(&k, &v0, 0.0, 3.0, &p).unwrap();
    for (t, v) in sol.times().iter().zip(sol.values()) {
        for (a, b) in v.iter().zip(&v0) {
            assert!((a - (-c * t).exp() * b).abs() < 1e-14);
        }
    }
    // Implicit Euler gives (1 + ch)^{−t/h}.
    let p = PropagateParams { scheme: Scheme::ImplicitEuler, dt: 0.25, ..Default::default() };
    let sol = propagate(&k, &v0, 0.0, 3.0, &p).unwrap();
    let factor = (1.0 + c * 0.25f64).powi(-12);
    assert!((sol.final_values()[3] - 3.0 * factor).abs() < 1e-14);
}

fn matrix_exponential_error(n: usize, seed: u64) -> f64 {
    let frame = random_frame(n, seed);
    let a = frame.generator();
    let k = constant(frame);
    let b = n / 2;
    let t = 3.0;
    let p = PropagateParams { scheme: Scheme::Exponential, dt: 0.5, ..Default::default() };
    let sol = propagate_delta(&k, b, 0.0, t, &p).unwrap();
    let oracle = (a * -t).exp() * DVector::from_vec(delta(n, b));
    let got = DVector::from_column_slice(sol.final_values());
    (got - &oracle).norm() / oracle.norm()
}

#[test]
fn constant_kernel_matches_matrix_exponential_k8() {
    for seed in 0..5 {
        let err = matrix_exponential_error(17, seed);
        assert!(err < 1e-6, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn implicit_euler_converges_to_the_exponential() {
    let frame = random_frame(9, 3);
    let a: DMatrix<f64> = frame.generator();
    let k = constant(frame);
    let oracle = (a * -1.0).exp() * DVector::from_vec(delta(9, 4));
    let err = |dt: f64| {
        let p = PropagateParams { dt, ..Default::default() };
        let v = DVector::from_column_slice(propagate_delta(&k, 4, 0.0, 1.0, &p).unwrap().final_values());
        (v - &oracle).norm()
    };
    // First order: halving the step roughly halves the error.
    let (e1, e2) = (err(0.02), err(0.01));
    assert!(e2 < e1 && e1 / e2 > 1.8 && e1 / e2 < 2.2, "{e1:e} {e2:e}");
}

#[test]
fn piecewise_kernel_matches_product_of_exponentials() {
    let n = 7;
    let frames: Vec<KernelFrame> = (0..3).map(|s| random_frame(n, 10 + s)).collect();
    let times = vec![0.0, 0.4, 1.1];
    let mats: Vec<DMatrix<f64>> = frames.iter().map(|f| f.generator()).collect();
    let kernel = HessianKernel::new(IndexWindow::full(n), times, frames).unwrap();
    let p = PropagateParams { scheme: Scheme::Exponential, dt: 0.15, ..Default::default() };
    let sol = propagate_delta(&kernel, 2, 0.0, 1.1, &p).unwrap();
    let oracle = (&mats[1] * -0.7).exp() * ((&mats[0] * -0.4).exp() * DVector::from_vec(delta(n, 2)));
    let got = DVector::from_column_slice(sol.final_values());
    assert!((got - &oracle).norm() < 1e-12 * oracle.norm().max(1.0));
}

#[test]
fn rejects_range_outside_a_path_kernel() {
    let n = 3;
    let frames = vec![random_frame(n, 1), random_frame(n, 2)];
    let k = HessianKernel::new(IndexWindow::full(n), vec![1.0, 2.0], frames).unwrap();
    let p = PropagateParams::default();
    assert!(propagate(&k, &[1.0, 0.0, 0.0], 0.5, 2.0, &p).is_err());
    assert!(propagate(&k, &[1.0, 0.0, 0.0], 1.0, 2.5, &p).is_err());
    assert!(propagate(&k, &[1.0, 0.0], 1.0, 2.0, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagation_contracts_every_lp_norm(
        n in 2usize..14,
        seed in 0u64..10_000,
        exponential in any::<bool>(),
        t in 0.05f64..5.0,
    ) {
        let k = constant(random_frame(n, seed));
        let mut rng = stream_rng(seed, 1);
        let v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let scheme = if exponential { Scheme::Exponential } else { Scheme::ImplicitEuler };
        let p = PropagateParams { scheme, dt: 0.1, ..Default::default() };
        let sol = propagate(&k, &v0, 0.0, t, &p).unwrap();
        for q in [1.0, 1.5, 2.0] {
            let mut prev = lp_norm(&v0, q);
            for v in sol.values() {
                let now = lp_norm(v, q);
                prop_assert!(now <= prev * (1.0 + 1e-6), "p = {}: {} > {}", q, now, prev);
                prev = now;
            }
        }
    }

    #[test]
    fn nonnegative_data_stays_nonnegative(n in 2usize..14, seed in 0u64..10_000, t in 0.05f64..5.0) {
        let k = constant(random_frame(n, seed));
        let mut rng = stream_rng(seed, 2);
        let v0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let ie = propagate(&k, &v0, 0.0, t, &PropagateParams::default()).unwrap();
        prop_assert!(ie.values().iter().flatten().all(|&x| x >= 0.0));
        let p = PropagateParams { scheme: Scheme::Exponential, ..Default::default() };
        let ex = propagate(&k, &v0, 0.0, t, &p).unwrap();
        prop_assert!(ex.values().iter().flatten().all(|&x| x >= -1e-12));
    }
}

#[test]
fn batched_columns_match_single_runs() {
    let n = 7;
    let frames: Vec<KernelFrame> = (0..3).map(|s| random_frame(n, 20 + s)).collect();
    let kernel = HessianKernel::new(IndexWindow::full(n), vec![0.0, 0.5, 1.2], frames).unwrap();
    let initials: Vec<Vec<f64>> = (0..3).map(|c| (0..n).map(|i| ((i * (c + 1)) as f64).cos()).collect()).collect();
    for scheme in [Scheme::Exponential, Scheme::ImplicitEuler] {
        let p = PropagateParams { scheme, dt: 0.2, ..Default::default() };
        let many = propagate_many(&kernel, &initials, 0.0, 1.2, &p).unwrap();
        for (v0, sol) in initials.iter().zip(&many) {
            let single = propagate(&kernel, v0, 0.0, 1.2, &p).unwrap();
            assert_eq!(single.times(), sol.times());
            for (a, b) in single.values().iter().flatten().zip(sol.values().iter().flatten()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}

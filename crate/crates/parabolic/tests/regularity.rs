use loggas_dynamics::{HessianKernel, KernelFrame};
use loggas_model::IndexWindow;
use loggas_parabolic::{
    build_cutoffs, de_giorgi_energy, de_giorgi_level, fit_holder_exponent, holder_oscillation, lp_norm, propagate,
    propagate_delta, psi, PropagateParams, PropagatorSolution, Scheme,
};
use proptest::prelude::*;

fn inverse_square(n: usize) -> HessianKernel {
    let frame = KernelFrame::from_fn(n, |j, k| 1.0 / ((k - j) as f64).powi(2), vec![0.0; n]).unwrap();
    HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0]).unwrap()
}

#[test]
fn constant_data_has_no_oscillation() {
    let n = 41;
    let sol = PropagatorSolution::new(IndexWindow::full(n), vec![0.0, 10.0], vec![vec![2.5; n]; 2]).unwrap();
    assert_eq!(holder_oscillation(&sol, 20, 9.0, 0.2).unwrap(), 0.0);
}

#[test]
fn oscillation_is_at_most_twice_the_sup() {
    let n = 41;
    let k = inverse_square(n);
    let v0: Vec<f64> = (0..n).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect();
    let sol = propagate(&k, &v0, 0.0, 8.0, &PropagateParams::default()).unwrap();
    let osc = holder_oscillation(&sol, 20, 8.0, 0.0).unwrap();
    assert!(osc <= 2.0 * lp_norm(sol.final_values(), f64::INFINITY));
}

#[test]
fn window_outside_the_range_is_an_error() {
    let n = 11;
    let sol = PropagatorSolution::new(IndexWindow::full(n), vec![0.0, 100.0], vec![vec![0.0; n]; 2]).unwrap();
    assert!(holder_oscillation(&sol, 5, 36.0, 0.0).is_err());
    assert!(holder_oscillation(&sol, 5, 4.0, 0.5).is_err());
    assert!(holder_oscillation(&sol, 5, 4.0, 0.0).is_ok());
}

#[test]
fn oscillation_times_sigma_decreases_for_inverse_square_kernel() {
    let k_half = 64usize;
    let n = 2 * k_half + 1;
    let k = inverse_square(n);
    let p = PropagateParams { scheme: Scheme::Exponential, dt: 0.25, ..Default::default() };
    let sol = propagate_delta(&k, k_half, 0.0, 40.0, &p).unwrap();
    let alpha = 1.0 / 3.0;
    // Radii σ^{2/3} = 2, 3, 4, 6, 8.
    let sigmas: Vec<f64> = [2.0f64, 3.0, 4.0, 6.0, 8.0].iter().map(|r| r.powf(1.5)).collect();
    let osc: Vec<f64> = sigmas.iter().map(|&s| holder_oscillation(&sol, k_half, s, alpha).unwrap()).collect();
    for w in sigmas.iter().zip(&osc).collect::<Vec<_>>().windows(2) {
        assert!(w[1].0 * w[1].1 < w[0].0 * w[0].1, "{osc:?}");
    }
    assert!(fit_holder_exponent(&sigmas, &osc, alpha).unwrap().exponent > 0.0);
}

#[test]
fn cutoff_examples() {
    let (n, m, z, ell) = (201, 5.0, 100, 2.0);
    let c = build_cutoffs(n, m, z, ell, 0.05).unwrap();
    for i in 0..n {
        let d = i.abs_diff(z) as f64;
        if d <= m {
            assert_eq!(c.psi[i], 0.0);
        }
        if d <= 8.0 * m {
            assert_eq!(c.f[i], -ell);
        }
        if d >= 9.0 * m {
            assert_eq!(c.f[i], 0.0);
        }
        // λ⁻⁴ = 160000 covers the whole window.
        assert_eq!(c.psi_tilde[i], 0.0);
    }
    assert!((c.psi[z + 20] - ell).abs() < 1e-15);
    assert!(build_cutoffs(n, m, z, ell, 0.1).is_err());
    assert!(build_cutoffs(n, m, z, ell, 0.0).is_err());
    assert!(build_cutoffs(n, 0.5, z, ell, 0.05).is_err());
}

proptest! {
    #[test]
    fn cutoffs_are_ordered(
        m in 1.0f64..20.0,
        z in 0usize..400,
        ell in 0.0f64..10.0,
        lambda in 0.005f64..0.0999,
    ) {
        let n = 401;
        // Small λ⁻⁴ cores are only reachable with λ close to 1/10; scale M
        // down to see ψ̃ switch on inside the window.
        let c = build_cutoffs(n, m, z, ell, lambda).unwrap();
        for i in 0..n {
            prop_assert!(c.phi0[i] <= c.phi1[i] && c.phi1[i] <= c.phi2[i] && c.phi2[i] <= ell + c.psi_tilde[i]);
            prop_assert!(c.psi[i] >= 0.0 && c.psi_tilde[i] >= 0.0);
            if i.abs_diff(z) as f64 >= 9.0 * m {
                prop_assert_eq!(c.phi0[i], ell + c.psi_tilde[i]);
                prop_assert_eq!(c.phi2[i], ell + c.psi_tilde[i]);
            }
            if i.abs_diff(z) as f64 <= m * lambda.powi(-4) {
                prop_assert_eq!(c.psi_tilde[i], 0.0);
            }
        }
    }
}

#[test]
fn energy_vanishes_below_the_cutoff() {
    let (n, m, z, ell) = (41, 3.0, 20, 1.0);
    let k = inverse_square(n);
    let cut = psi(n, m, z, ell);
    let (t_k, ell_k) = de_giorgi_level(2, m, ell);
    let v: Vec<f64> = cut.iter().map(|p| p + ell_k - 0.01).collect();
    let sol = PropagatorSolution::new(IndexWindow::full(n), vec![0.0, 10.0], vec![v.clone(), v]).unwrap();
    let e = de_giorgi_energy(&sol, &k, &cut, m, t_k, ell_k).unwrap();
    assert_eq!(e.total, 0.0);
}

#[test]
fn hand_evaluated_energy_on_the_flat_core() {
    let (n, m, z, ell, w, c) = (41usize, 3.0, 20usize, 1.2, 0.4, 0.05);
    let frame = KernelFrame::dense(vec![0.0; n * n], vec![w; n]).unwrap();
    let k = HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0]).unwrap();
    let cut = psi(n, m, z, ell);
    let (t_k, ell_k) = de_giorgi_level(1, m, ell);
    // v = ψ + ℓ_k + c on |i − Z| ≤ M, at the threshold elsewhere.
    let v: Vec<f64> =
        (0..n).map(|i| cut[i] + ell_k + if i.abs_diff(z) as f64 <= m { c } else { 0.0 }).collect();
    let times: Vec<f64> = (0..=20).map(|t| t as f64 * 0.5).collect();
    let sol = PropagatorSolution::new(IndexWindow::full(n), times, vec![v; 21]).unwrap();
    let e = de_giorgi_energy(&sol, &k, &cut, m, t_k, ell_k).unwrap();
    let count = 2.0 * m + 1.0;
    let scale = 1.0 / (m * ell_k * ell_k);
    assert!((e.sup_term - count * c * c * scale).abs() < 1e-12);
    assert!((e.dissipation_term - (-t_k) * w * count * c * c * scale).abs() < 1e-12);
}

#[test]
fn energy_levels_do_not_increase() {
    let (n, m, z, ell) = (129usize, 8.0, 64usize, 1.0);
    let k = inverse_square(n);
    let p = PropagateParams { scheme: Scheme::Exponential, dt: 0.5, ..Default::default() };
    let v0: Vec<f64> = (0..n).map(|i| 0.8 * (-((i as f64 - 64.0) / 20.0).powi(2)).exp()).collect();
    let sol = propagate(&k, &v0, 0.0, 16.0, &p).unwrap();
    let cut = psi(n, m, z, ell);
    let levels: Vec<f64> = (1..8)
        .map(|lvl| {
            let (t_k, ell_k) = de_giorgi_level(lvl, m, ell);
            de_giorgi_energy(&sol, &k, &cut, m, t_k, ell_k).unwrap().total
        })
        .collect();
    assert!(levels[0] > 0.0);
    assert!(levels.windows(2).all(|w| w[1] <= w[0]), "{levels:?}");
}

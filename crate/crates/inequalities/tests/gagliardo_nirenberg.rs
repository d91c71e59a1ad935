use loggas_inequalities::{
    fuzz_sweep, gn_global_check, gn_local_check, gn_ratio, hurwitz_zeta, interpolation_comparison, running_max, LatticeFunction,
    LatticeKernel,
};
use proptest::prelude::*;

/// Σ_{j≠0} 1/|j|^{1+s} by direct summation to J plus the integral tail.
fn two_sided_series(s: f64) -> f64 {
    let j_max = 2_000_000u64;
    let head: f64 = (1..=j_max).map(|j| (j as f64).powf(-1.0 - s)).sum();
    let x = j_max as f64 + 0.5;
    2.0 * (head + x.powf(-s) / s)
}

#[test]
fn delta_ratio_from_the_series() {
    let energy = 2.0 * two_sided_series(1.0);
    let oracle = energy.powf(-0.25);
    let r = gn_ratio(&LatticeFunction::delta(0), 4.0, 1.0).unwrap();
    assert!((r - oracle).abs() < 1e-9, "{r} vs {oracle}");
    assert!((r - 0.624).abs() < 1e-3);
}

#[test]
fn ratio_domain() {
    let f = LatticeFunction::delta(0);
    assert!(gn_ratio(&f, 2.0, 1.0).is_err());
    assert!(gn_ratio(&f, 4.0, 0.5).is_err());
    assert!(gn_ratio(&f, 4.0, 2.0).is_err());
    assert!(gn_ratio(&LatticeFunction::new(3, vec![0.0, 0.0]).unwrap(), 4.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn ratio_is_scale_and_translation_invariant(
        values in prop::collection::vec(-3.0f64..3.0, 1..20),
        c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        shift in -1000i64..1000,
        p in 2.1f64..8.0,
        t in 0.01f64..0.99,
    ) {
        let f = LatticeFunction::new(0, values).unwrap();
        prop_assume!(!f.is_zero());
        let lo = 1.0 - 2.0 / p;
        let s = lo + t * (2.0 - lo);
        let r = gn_ratio(&f, p, s).unwrap();
        prop_assert!((gn_ratio(&f.scaled(c), p, s).unwrap() - r).abs() <= 1e-10 * r);
        prop_assert!((gn_ratio(&f.translated(shift), p, s).unwrap() - r).abs() <= 1e-10 * r);
    }

    #[test]
    fn larger_kernel_never_raises_the_constant(
        values in prop::collection::vec(-3.0f64..3.0, 1..16),
        extra in 0.0f64..5.0,
        bump in 0.0f64..2.0,
    ) {
        let f = LatticeFunction::new(-4, values).unwrap();
        let base = LatticeKernel::inverse_square(1.0);
        let bigger = LatticeKernel::new(move |i, j| (1.0 + extra) / ((i - j) as f64).powi(2) + bump, 3, 1.0 + extra);
        let c0 = gn_global_check(&f, &base, 0.5, 0.5, 1.0).unwrap().minimal_c;
        let c1 = gn_global_check(&f, &bigger, 0.5, 0.5, 1.0).unwrap().minimal_c;
        prop_assert!(c1 <= c0 * (1.0 + 1e-12));
    }
}

#[test]
fn global_delta_with_inverse_square_kernel() {
    let k = LatticeKernel::inverse_square(1.0);
    let r = gn_global_check(&LatticeFunction::delta(5), &k, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(r.lhs, 1.0);
    assert!((r.dirichlet - 2.0 * two_sided_series(1.0)).abs() < 1e-9);
    assert!(r.minimal_c <= 1.0);
    assert!(r.floors_ok);
}

#[test]
fn zero_function_gives_zero_everywhere() {
    let k = LatticeKernel::inverse_square(1.0);
    let r = gn_global_check(&LatticeFunction::new(0, vec![0.0; 4]).unwrap(), &k, 1.0, 1.0, 1.0).unwrap();
    assert_eq!((r.lhs, r.dirichlet, r.sup_term, r.minimal_c), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn floor_violations_are_reported() {
    let k = LatticeKernel::new(|i, j| if i.abs_diff(j) == 1 { 0.01 } else { 1.0 / ((i - j) as f64).powi(2) }, 2, 1.0);
    let r = gn_global_check(&LatticeFunction::delta(0), &k, 1.0, 0.5, 1.0).unwrap();
    assert!(!r.floors_ok);
    assert!((r.smallest_floor - 0.01).abs() < 1e-15);
    assert!(gn_global_check(&LatticeFunction::delta(0), &k, 1.0, 0.5, 0.4).is_err());
}

#[test]
fn global_constant_over_random_functions() {
    let k = LatticeKernel::inverse_square(1.0);
    let rows = fuzz_sweep(10_000, 17, -10, 32, |f| Ok(gn_global_check(f, &k, 1.0, 1.0, 1.0).unwrap().minimal_c)).unwrap();
    let worst = running_max(&rows);
    assert!(worst.is_finite() && worst > 0.0 && worst < 1.0, "largest constant {worst}");
}

#[test]
fn local_form_reduces_to_the_global_one() {
    let k = LatticeKernel::inverse_square(1.0);
    let f = LatticeFunction::delta(0);
    let global = gn_global_check(&f, &k, 1.0, 1.0, 1.0).unwrap();
    let local = gn_local_check(&f, &k, 0, 400, 0.5, 1.0, 1.0, 1.0).unwrap();
    // Only pairs inside 𝓘 enter: the missing tail is 4·Σ_{j>L} 1/j².
    let tail = 4.0 * hurwitz_zeta(2.0, 401.0);
    assert!((global.dirichlet - local.dirichlet - tail).abs() < 1e-10);
    assert!((local.leak_term - 1.0 / 200.0).abs() < 1e-15);
    let wide = gn_local_check(&f, &k, 0, 50, 1e12, 1.0, 1.0, 1.0).unwrap();
    assert!(wide.leak_term < 1e-12);
}

#[test]
fn local_support_must_stay_inside() {
    let k = LatticeKernel::inverse_square(1.0);
    let f = LatticeFunction::new(8, vec![1.0, 1.0]).unwrap();
    assert!(gn_local_check(&f, &k, 0, 8, 0.25, 1.0, 1.0, 1.0).is_err());
    assert!(gn_local_check(&f, &k, 0, 9, 0.25, 1.0, 1.0, 1.0).is_ok());
}

#[test]
fn local_constant_over_random_functions() {
    let k = LatticeKernel::inverse_square(1.0);
    let rows =
        fuzz_sweep(1000, 23, -64, 129, |f| Ok(gn_local_check(f, &k, 0, 64, 0.25, 1.0, 1.0, 1.0).unwrap().minimal_c))
            .unwrap();
    let worst = running_max(&rows);
    assert!(worst.is_finite() && worst > 0.0, "largest constant {worst}");
}

#[test]
fn interpolation_of_the_hat_function() {
    // Hat on [−1, 1]: ∫∫|φ(x)−φ(y)|²/|x−y|² = ∫|ξ||φ̂|² = 8∫_0^∞ sin⁴u/u³ du = 8 ln 2.
    let oracle = 8.0 * std::f64::consts::LN_2 / (2.0 * two_sided_series(1.0));
    let r = interpolation_comparison(&LatticeFunction::delta(3), 1.0).unwrap();
    assert!((r - oracle).abs() < 1e-6, "{r} vs {oracle}");
    assert!(r < 5.0);
}

#[test]
fn interpolation_of_zero_is_zero() {
    assert_eq!(interpolation_comparison(&LatticeFunction::new(0, vec![0.0; 3]).unwrap(), 1.0).unwrap(), 0.0);
}

#[test]
fn interpolation_constant_over_random_functions() {
    for s in [0.5, 1.0, 1.5] {
        let rows = fuzz_sweep(200, 31, 0, 12, |f| interpolation_comparison(f, s)).unwrap();
        let worst = running_max(&rows);
        assert!(worst.is_finite() && worst > 0.0 && worst < 10.0, "s = {s}: largest ratio {worst}");
    }
}

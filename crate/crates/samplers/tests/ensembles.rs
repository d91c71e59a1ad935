mod common;

use common::{ks_to_cdf, semicircle_cdf, small_tail_slope};
use loggas_model::stream_rng;
use loggas_samplers::{sample_gaussian_beta_tridiagonal, sample_generalized_wigner, EntryLaw, Symmetry, VarianceProfile};

#[test]
fn one_by_one_is_centered_gaussian() {
    let mut rng = stream_rng(1, 0);
    let beta = 2.0;
    let n = 20000;
    let xs: Vec<f64> = (0..n).map(|_| sample_gaussian_beta_tridiagonal(1, beta, &mut rng).unwrap().positions()[0]).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
    // N(0, 2)/√β has variance 2/β = 1.
    assert!(mean.abs() < 3.0 * (1.0 / n as f64).sqrt(), "{mean}");
    assert!((var - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn gue_tridiagonal_semicircle() {
    let mut rng = stream_rng(2, 0);
    let pooled: Vec<f64> = (0..100)
        .flat_map(|_| sample_gaussian_beta_tridiagonal(200, 2.0, &mut rng).unwrap().into_positions())
        .collect();
    let d = ks_to_cdf(pooled, semicircle_cdf);
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn two_particle_gap_tail_slope() {
    let mut rng = stream_rng(3, 0);
    let gaps: Vec<f64> = (0..100_000)
        .map(|_| {
            let c = sample_gaussian_beta_tridiagonal(2, 2.0, &mut rng).unwrap();
            c.positions()[1] - c.positions()[0]
        })
        .collect();
    let slope = small_tail_slope(gaps, 0.001, 0.05);
    assert!((slope - 3.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn goe_wigner_semicircle() {
    let mut rng = stream_rng(4, 0);
    let p = VarianceProfile::uniform(200).unwrap();
    let pooled: Vec<f64> = (0..100)
        .flat_map(|_| sample_generalized_wigner(&p, EntryLaw::Gaussian, Symmetry::Real, &mut rng).unwrap().into_positions())
        .collect();
    let d = ks_to_cdf(pooled, semicircle_cdf);
    assert!(d < 0.05, "KS {d}");
}

#[test]
fn banded_complex_bernoulli_semicircle() {
    let mut rng = stream_rng(5, 0);
    let p = VarianceProfile::circular_band(120, 30, 0.5).unwrap();
    let pooled: Vec<f64> = (0..60)
        .flat_map(|_| sample_generalized_wigner(&p, EntryLaw::Bernoulli, Symmetry::Complex, &mut rng).unwrap().into_positions())
        .collect();
    let d = ks_to_cdf(pooled, semicircle_cdf);
    assert!(d < 0.08, "KS {d}");
}

use std::f64::consts::PI;

use loggas_model::{check_regular_potential, BoundaryData, IndexWindow, PotentialModel, RegularityTolerances, Scaling};

fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

fn quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const N: usize = 4096;
const K: usize = 32;
const XI: f64 = 0.5;

fn classical() -> Vec<f64> {
    (1..=N).map(|j| quantile(j as f64 / N as f64)).collect()
}

fn window() -> IndexWindow {
    IndexWindow::centered(N as i64 / 2, K as i64).unwrap()
}

fn check(b: &BoundaryData) -> loggas_model::RegularityReport {
    let rho = (4.0 - b.midpoint().powi(2)).sqrt() / (2.0 * PI);
    check_regular_potential(&PotentialModel::gaussian(), b, rho, XI, K, RegularityTolerances::default(), 2000).unwrap()
}

#[test]
fn exact_quantiles_are_regular() {
    let b = BoundaryData::from_full(&classical(), window(), Scaling::Macroscopic).unwrap();
    let r = check(&b);
    assert!(r.all_ok(), "{r:?}");
}

#[test]
fn one_sided_perturbation_breaks_profile() {
    let mut y = classical();
    let shift = 10.0 * (K as f64).powf(XI) / N as f64;
    let first_above = window().hi as usize + 1;
    for p in y.iter_mut().skip(first_above) {
        *p += shift;
    }
    let b = BoundaryData::from_full(&y, window(), Scaling::Macroscopic).unwrap();
    let r = check(&b);
    assert!(r.interval_length_ok, "{r:?}");
    assert!(!r.derivative_profile_ok, "{r:?}");
}

#[test]
fn doubled_interval_fails_length() {
    let y = classical();
    let b = BoundaryData::from_full(&y, window(), Scaling::Macroscopic).unwrap();
    let rho = 1.0 / PI;
    let extra = 2.0 * (2 * K + 1) as f64 / (N as f64 * rho) - b.length();
    let below: Vec<f64> = b.below().iter().map(|v| v - 0.5 * extra).collect();
    let above: Vec<f64> = b.above().iter().map(|v| v + 0.5 * extra).collect();
    let wide = BoundaryData::new(below, above, N, Scaling::Macroscopic).unwrap();
    assert!((wide.length() - 2.0 * (2 * K + 1) as f64 / (N as f64 * rho)).abs() < 1e-12);
    let r = check(&wide);
    assert!(!r.interval_length_ok, "{r:?}");
}

#![allow(dead_code)]
use std::f64::consts::PI;

pub fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

/// sup |F_n − F| for a continuous reference CDF.
pub fn ks_to_cdf(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance.
pub fn ks_two(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
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

/// Least-squares slope of log F_n(s) against log s over the empirical
/// quantile range [q_lo, q_hi].
pub fn small_tail_slope(mut s: Vec<f64>, q_lo: f64, q_hi: f64) -> f64 {
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let lo = (q_lo * n as f64) as usize;
    let hi = (q_hi * n as f64) as usize;
    let pts: Vec<(f64, f64)> = (lo.max(1)..=hi).step_by(((hi - lo) / 60).max(1)).map(|k| (s[k - 1].ln(), (k as f64 / n as f64).ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean and batch-means standard error.
pub fn mean_and_se(xs: &[f64], batches: usize) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let size = n / batches;
    let bm: Vec<f64> = (0..batches).map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let var = bm.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// Trapezoid moments of an unnormalized density on [a, b].
pub fn quadrature_moments(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64, impl Fn(f64) -> f64) {
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let ws: Vec<f64> = xs.iter().enumerate().map(|(i, &x)| f(x) * if i == 0 || i == n { 0.5 } else { 1.0 }).collect();
    let z: f64 = ws.iter().sum();
    let m1 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / z;
    let m2 = xs.iter().zip(&ws).map(|(x, w)| x * x * w).sum::<f64>() / z;
    let cum: Vec<f64> = ws.iter().scan(0.0, |acc, w| {
        *acc += w;
        Some(*acc / z)
    }).collect();
    let cdf = move |x: f64| {
        let k = (((x - a) / h).floor().max(0.0) as usize).min(n);
        cum[k]
    };
    (m1, m2, cdf)
}

/// C² concave extension of the logarithm below `eps`: the logarithm on
/// `[eps, ∞)` and its second-order Taylor polynomial at `eps` below.
/// Returns the value and the first two derivatives.
pub fn log_eps(x: f64, eps: f64) -> (f64, f64, f64) {
    if x >= eps {
        (x.ln(), 1.0 / x, -1.0 / (x * x))
    } else {
        let t = (x - eps) / eps;
        (eps.ln() + t - 0.5 * t * t, (1.0 - t) / eps, -1.0 / (eps * eps))
    }
}

#[cfg(test)]
mod tests {
    use super::log_eps;

    #[test]
    fn seam_and_origin() {
        let eps = 1e-3;
        assert_eq!(log_eps(2.0 * eps, eps).0, (2.0 * eps).ln());
        let above = log_eps(eps, eps);
        let below = log_eps(eps * (1.0 - 1e-12), eps);
        assert!((above.0 - below.0).abs() < 1e-9);
        assert!((above.1 - below.1).abs() < 1e-6 * above.1);
        assert!((above.2 - below.2).abs() < 1e-6 * above.2.abs());
        assert!((log_eps(0.0, eps).0 - (eps.ln() - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn concave_everywhere() {
        for k in -50..50 {
            let x = k as f64 * 0.01;
            assert!(log_eps(x, 0.1).2 < 0.0);
        }
    }
}

/// Decimal rendering with 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::fmt17;

    #[test]
    fn round_trips() {
        for x in [1.0 / 3.0, -2.0_f64.sqrt(), 1e-310, 6.02214076e23, 0.1 + 0.2] {
            let back: f64 = fmt17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        assert_eq!(fmt17(0.0), "0");
    }
}

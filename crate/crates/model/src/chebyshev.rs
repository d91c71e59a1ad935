use std::f64::consts::PI;

/// Chebyshev series on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolate `f` at the `degree + 1` Chebyshev points of the first kind.
    pub fn fit(f: impl Fn(f64) -> f64, a: f64, b: f64, degree: usize) -> Self {
        let n = degree + 1;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let t = (PI * (k as f64 + 0.5) / n as f64).cos();
                f(mid + half * t)
            })
            .collect();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, fk)| fk * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if j == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Self { a, b, coeffs }
    }

    pub fn from_coefficients(a: f64, b: f64, coeffs: Vec<f64>) -> Self {
        Self { a, b, coeffs }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Series of the derivative with respect to `x`.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self { a: self.a, b: self.b, coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for j in (0..n - 1).rev() {
            d[j] = d[j + 2] + 2.0 * (j + 1) as f64 * self.coeffs[j + 1];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let scale = 2.0 / (self.b - self.a);
        for c in &mut d {
            *c *= scale;
        }
        Self { a: self.a, b: self.b, coeffs: d }
    }
}

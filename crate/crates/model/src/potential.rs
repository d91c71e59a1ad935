use std::fmt;
use std::sync::Arc;

use crate::error::{ModelError, Result};

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A confining potential given by numeric evaluators for V, V' and V'',
/// together with a lower bound on V''.
#[derive(Clone)]
pub struct PotentialModel {
    name: String,
    value: Eval,
    first: Eval,
    second: Eval,
    inf_second_derivative: f64,
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialModel")
            .field("name", &self.name)
            .field("inf_second_derivative", &self.inf_second_derivative)
            .finish()
    }
}

impl PotentialModel {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inf_second_derivative: f64,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            first: Arc::new(first),
            second: Arc::new(second),
            inf_second_derivative,
        }
    }

    /// V(x) = x²/2, whose equilibrium density is the semicircle on [-2, 2].
    pub fn gaussian() -> Self {
        Self::scaled_gaussian(1.0)
    }

    /// V(x) = s²x²/2.
    pub fn scaled_gaussian(s: f64) -> Self {
        let s2 = s * s;
        Self::new(
            format!("gaussian(s={s})"),
            move |x| 0.5 * s2 * x * x,
            move |x| s2 * x,
            move |_| s2,
            s2,
        )
    }

    /// V(x) = x⁴/4.
    pub fn quartic() -> Self {
        Self::new("quartic", |x| 0.25 * x.powi(4), |x| x.powi(3), |x| 3.0 * x * x, 0.0)
    }

    /// V(x) = Σ c_k x^k for coefficients `c_0, c_1, ...`; the V'' floor is
    /// supplied by the caller and checked with [`check_second_derivative_floor`](Self::check_second_derivative_floor).
    pub fn polynomial(coefficients: Vec<f64>, inf_second_derivative: f64) -> Self {
        let c = Arc::new(coefficients);
        let (c0, c1, c2) = (c.clone(), c.clone(), c.clone());
        Self::new(
            format!("polynomial{:?}", c.as_slice()),
            move |x| c0.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            move |x| {
                c1.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &a)| acc * x + k as f64 * a)
            },
            move |x| {
                c2.iter()
                    .enumerate()
                    .skip(2)
                    .rev()
                    .fold(0.0, |acc, (k, &a)| acc * x + (k * (k - 1)) as f64 * a)
            },
            inf_second_derivative,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn first(&self, x: f64) -> f64 {
        (self.first)(x)
    }

    pub fn second(&self, x: f64) -> f64 {
        (self.second)(x)
    }

    pub fn inf_second_derivative(&self) -> f64 {
        self.inf_second_derivative
    }

    /// Spot-check the V'' floor on `n` equispaced points of `[a, b]`.
    pub fn check_second_derivative_floor(&self, a: f64, b: f64, n: usize) -> Result<()> {
        let n = n.max(2);
        for i in 0..n {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            let v2 = self.second(x);
            if v2 < self.inf_second_derivative - 1e-12 * (1.0 + v2.abs()) {
                return Err(ModelError::Invariant(format!(
                    "V''({x}) = {v2} below certified floor {}",
                    self.inf_second_derivative
                )));
            }
        }
        Ok(())
    }
}

use loggas_model::{
    log_eps, BoundaryData, ExternalField, IndexWindow, PotentialModel, PotentialValue, Scaling,
};

use crate::error::{Result, SamplerError};

/// One-body part U of the energy E(x) = ½ Σ U(x_i) − Σ_{i<j} log(x_j − x_i).
#[derive(Debug, Clone)]
pub enum OneBody {
    /// Full system: U = N·V (macroscopic) or N·V(x/N) (microscopic).
    Global { potential: PotentialModel, n_total: usize, scaling: Scaling },
    /// Conditioned on frozen external points.
    Local(ExternalField),
    /// (1 − r)·first + r·second, both over the same configuration interval.
    Interpolated { r: f64, first: ExternalField, second: ExternalField },
}

impl OneBody {
    fn field_scale(field: &ExternalField) -> f64 {
        match field.scaling() {
            Scaling::Macroscopic => field.n_total() as f64,
            Scaling::Microscopic => 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> PotentialValue {
        match self {
            OneBody::Global { potential, n_total, scaling } => {
                let n = *n_total as f64;
                match scaling {
                    Scaling::Macroscopic => PotentialValue {
                        value: n * potential.value(x),
                        first: n * potential.first(x),
                        second: n * potential.second(x),
                    },
                    Scaling::Microscopic => {
                        let u = x / n;
                        PotentialValue {
                            value: n * potential.value(u),
                            first: potential.first(u),
                            second: potential.second(u) / n,
                        }
                    }
                }
            }
            OneBody::Local(field) => field.eval(x).scaled(Self::field_scale(field)),
            OneBody::Interpolated { r, first, second } => first
                .eval(x)
                .scaled((1.0 - r) * Self::field_scale(first))
                .plus(second.eval(x).scaled(r * Self::field_scale(second))),
        }
    }

    /// (U', U'') without evaluating U.
    pub fn slope(&self, x: f64) -> (f64, f64) {
        match self {
            OneBody::Global { .. } => {
                let u = self.eval(x);
                (u.first, u.second)
            }
            OneBody::Local(field) => {
                let s = Self::field_scale(field);
                let (d1, d2) = field.slope(x);
                (s * d1, s * d2)
            }
            OneBody::Interpolated { r, first, second } => {
                let (s1, s2) = ((1.0 - r) * Self::field_scale(first), r * Self::field_scale(second));
                let (a1, a2) = first.slope(x);
                let (b1, b2) = second.slope(x);
                (s1 * a1 + s2 * b1, s1 * a2 + s2 * b2)
            }
        }
    }

    /// Configuration interval, if conditioned.
    pub fn interval(&self) -> Option<(f64, f64)> {
        match self {
            OneBody::Global { .. } => None,
            OneBody::Local(f) => Some(f.interval()),
            OneBody::Interpolated { first, .. } => Some(first.interval()),
        }
    }

    /// Lower bound on U'' from the confining potential (external logs only add).
    pub fn potential_second_floor(&self) -> f64 {
        match self {
            OneBody::Global { potential, n_total, scaling } => match scaling {
                Scaling::Macroscopic => *n_total as f64 * potential.inf_second_derivative(),
                Scaling::Microscopic => potential.inf_second_derivative() / *n_total as f64,
            },
            OneBody::Local(_) | OneBody::Interpolated { .. } => f64::NEG_INFINITY,
        }
    }
}

/// Gibbs measure ∝ exp(−β E(x)) on ordered configurations, with
/// E(x) = ½ Σ U(x_i) − Σ_{i<j} log(x_j − x_i).
///
/// With `interaction_eps = Some(δ)` the pair logarithm is replaced by
/// `log_δ` and the measure lives on all of ℝ^n (no ordering constraint).
#[derive(Debug, Clone)]
pub struct LogGasMeasure {
    beta: f64,
    one_body: OneBody,
    window: IndexWindow,
    scaling: Scaling,
    interaction_eps: Option<f64>,
}

impl LogGasMeasure {
    fn build(beta: f64, one_body: OneBody, window: IndexWindow, scaling: Scaling, eps: Option<f64>) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(SamplerError::Domain(format!("beta = {beta} must be positive")));
        }
        if let Some(e) = eps {
            if !(e > 0.0) {
                return Err(SamplerError::Domain(format!("regularization {e} must be positive")));
            }
        }
        Ok(Self { beta, one_body, window, scaling, interaction_eps: eps })
    }

    /// Full β-ensemble of `n` particles, i.e. exp(−Nβ H) in macroscopic units.
    pub fn global(beta: f64, potential: PotentialModel, n: usize, scaling: Scaling) -> Result<Self> {
        Self::build(
            beta,
            OneBody::Global { potential, n_total: n, scaling },
            IndexWindow::full(n),
            scaling,
            None,
        )
    }

    /// Local measure conditioned on `boundary`, for the labels in `window`.
    pub fn local(beta: f64, potential: &PotentialModel, boundary: &BoundaryData, window: IndexWindow) -> Result<Self> {
        let field = ExternalField::new(potential, boundary, None)?;
        Self::build(beta, OneBody::Local(field), window, boundary.scaling(), None)
    }

    /// Interpolating measure between two boundary conditions sharing J.
    pub fn interpolating(
        beta: f64,
        r: f64,
        first: (&PotentialModel, &BoundaryData),
        second: (&PotentialModel, &BoundaryData),
        window: IndexWindow,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(SamplerError::Domain(format!("interpolation parameter r = {r} outside [0, 1]")));
        }
        let f1 = ExternalField::new(first.0, first.1, None)?;
        let f2 = ExternalField::new(second.0, second.1, None)?;
        if first.1.scaling() != second.1.scaling() {
            return Err(SamplerError::Domain("boundaries use different scalings".into()));
        }
        let (i1, i2) = (f1.interval(), f2.interval());
        if (i1.0 - i2.0).abs() > 1e-12 * (1.0 + i1.0.abs()) || (i1.1 - i2.1).abs() > 1e-12 * (1.0 + i1.1.abs()) {
            return Err(SamplerError::Domain(format!("configuration intervals differ: {i1:?} vs {i2:?}")));
        }
        Self::build(beta, OneBody::Interpolated { r, first: f1, second: f2 }, window, first.1.scaling(), None)
    }

    /// Regularized local measure: every logarithm (pair and external) is
    /// replaced by `log_{aε}` with a = |J|. Microscopic boundary required.
    pub fn regularized_local(
        beta: f64,
        potential: &PotentialModel,
        boundary: &BoundaryData,
        window: IndexWindow,
        epsilon: f64,
    ) -> Result<Self> {
        if boundary.scaling() != Scaling::Microscopic {
            return Err(SamplerError::Domain("regularized measure is defined in microscopic units".into()));
        }
        let delta = boundary.length() * epsilon;
        let field = ExternalField::new(potential, boundary, Some(delta))?;
        Self::build(beta, OneBody::Local(field), window, Scaling::Microscopic, Some(delta))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn one_body(&self) -> &OneBody {
        &self.one_body
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn interaction_eps(&self) -> Option<f64> {
        self.interaction_eps
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        self.one_body.interval()
    }

    /// Whether `x` lies in the support: ordered and inside J unless
    /// regularized.
    pub fn admissible(&self, x: &[f64]) -> bool {
        if x.len() != self.len() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        if self.interaction_eps.is_some() {
            return true;
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return false;
        }
        match self.interval() {
            Some((a, b)) => x[0] > a && x[x.len() - 1] < b,
            None => true,
        }
    }

    /// Pair term log(d) (or its regularization) with derivatives.
    #[inline]
    pub fn pair_log(&self, d: f64) -> (f64, f64, f64) {
        match self.interaction_eps {
            Some(e) => log_eps(d, e),
            None => (d.ln(), 1.0 / d, -1.0 / (d * d)),
        }
    }

    /// E(x); +∞ outside the support.
    pub fn energy(&self, x: &[f64]) -> f64 {
        if !self.admissible(x) {
            return f64::INFINITY;
        }
        let one: f64 = x.iter().map(|&xi| self.one_body.eval(xi).value).sum::<f64>() * 0.5;
        one - self.pair_energy(x)
    }

    /// Σ_{i<j} log(x_j − x_i), accumulated as blocked products to save logs.
    fn pair_energy(&self, x: &[f64]) -> f64 {
        let n = x.len();
        if self.interaction_eps.is_some() {
            let mut s = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s += self.pair_log(x[j] - x[i]).0;
                }
            }
            return s;
        }
        let mut s = 0.0;
        for i in 0..n {
            let xi = x[i];
            let mut prod = 1.0;
            let mut count = 0;
            for &xj in &x[i + 1..] {
                prod *= xj - xi;
                count += 1;
                if count == 8 {
                    s += prod.ln();
                    prod = 1.0;
                    count = 0;
                }
            }
            s += prod.ln();
        }
        s
    }

    /// ∂E/∂x_i into `grad` without evaluating E. Assumes `x` admissible.
    pub fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            grad[i] = 0.5 * self.one_body.slope(x[i]).0;
        }
        for i in 0..n {
            let xi = x[i];
            let mut gi = 0.0;
            for j in i + 1..n {
                let l1 = match self.interaction_eps {
                    None => 1.0 / (x[j] - xi),
                    Some(_) => self.pair_log(x[j] - xi).1,
                };
                gi += l1;
                grad[j] -= l1;
            }
            grad[i] += gi;
        }
    }

    /// ∂E/∂x_i into `grad`; returns E. Assumes `x` admissible.
    pub fn energy_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = x.len();
        let mut one = 0.0;
        for i in 0..n {
            let u = self.one_body.eval(x[i]);
            one += u.value;
            grad[i] = 0.5 * u.first;
        }
        match self.interaction_eps {
            None => {
                for i in 0..n {
                    let xi = x[i];
                    let mut gi = 0.0;
                    for j in i + 1..n {
                        let inv = 1.0 / (x[j] - xi);
                        gi += inv;
                        grad[j] -= inv;
                    }
                    // −∂/∂x_i Σ log(x_j − x_i) = +Σ 1/(x_j − x_i).
                    grad[i] += gi;
                }
                0.5 * one - self.pair_energy(x)
            }
            Some(_) => {
                let mut pair = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        let (l, l1, _) = self.pair_log(x[j] - x[i]);
                        pair += l;
                        grad[i] += l1;
                        grad[j] -= l1;
                    }
                }
                0.5 * one - pair
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let m = LogGasMeasure::global(2.0, PotentialModel::quartic(), 5, Scaling::Macroscopic).unwrap();
        let x = [-1.1, -0.4, 0.05, 0.6, 1.3];
        let mut g = [0.0; 5];
        let e = m.energy_and_gradient(&x, &mut g);
        assert!((e - m.energy(&x)).abs() < 1e-12);
        let mut g2 = [0.0; 5];
        m.gradient(&x, &mut g2);
        assert_eq!(g, g2);
        for i in 0..5 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (m.energy(&xp) - m.energy(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-5 * (1.0 + g[i].abs()), "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn blocked_products_match_direct_logs() {
        let m = LogGasMeasure::global(1.0, PotentialModel::gaussian(), 30, Scaling::Microscopic).unwrap();
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 3.1 + 0.2 * (i as f64).sin()).collect();
        let direct: f64 = (0..30).flat_map(|i| (i + 1..30).map(move |j| (i, j))).map(|(i, j)| (x[j] - x[i]).ln()).sum();
        assert!((m.pair_energy(&x) - direct).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn rejects_r_outside_unit_interval() {
        let v = PotentialModel::gaussian();
        let b = BoundaryData::new(vec![-9.0, -5.0], vec![5.0, 9.0], 10, Scaling::Microscopic).unwrap();
        let w = IndexWindow::centered(0, 1).unwrap();
        assert!(LogGasMeasure::interpolating(1.0, 1.5, (&v, &b), (&v, &b), w).is_err());
        assert!(LogGasMeasure::interpolating(1.0, 0.3, (&v, &b), (&v, &b), w).is_ok());
    }
}

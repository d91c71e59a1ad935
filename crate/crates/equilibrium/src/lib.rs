//! Equilibrium densities of single-interval log-gases: the semicircle law in
//! closed form and a Chebyshev solver for general regular potentials.

use std::f64::consts::PI;
use std::fmt::Write as _;

use loggas_model::{fmt17, Chebyshev, PotentialModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported potential: {0}")]
    UnsupportedPotential(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, EquilibriumError>;

/// (1/2π)√((4−x²)₊).
pub fn semicircle_density(x: f64) -> f64 {
    (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
}

/// Closed-form semicircle CDF, clamped outside [−2, 2].
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensityKind {
    /// s ϱ_sc(s x), the equilibrium density of s²x²/2.
    Semicircle { scale: f64 },
    /// √((B−x)(x−A)) h(x) with h a Chebyshev series on [A, B].
    Numeric { h_coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDensity {
    support: (f64, f64),
    kind: DensityKind,
}

impl EquilibriumDensity {
    pub fn semicircle() -> Self {
        Self::scaled_semicircle(1.0)
    }

    pub fn scaled_semicircle(scale: f64) -> Self {
        Self { support: (-2.0 / scale, 2.0 / scale), kind: DensityKind::Semicircle { scale } }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    fn half_and_mid(&self) -> (f64, f64) {
        let (a, b) = self.support;
        (0.5 * (b - a), 0.5 * (a + b))
    }

    fn h(&self) -> Option<Chebyshev> {
        match &self.kind {
            DensityKind::Numeric { h_coefficients } => {
                Some(Chebyshev::from_coefficients(self.support.0, self.support.1, h_coefficients.clone()))
            }
            DensityKind::Semicircle { .. } => None,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::Semicircle { scale } => scale * semicircle_density(scale * x),
            DensityKind::Numeric { .. } => {
                let (a, b) = self.support;
                if x <= a || x >= b {
                    return 0.0;
                }
                ((b - x) * (x - a)).sqrt() * self.h().map_or(0.0, |h| h.eval(x))
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::Semicircle { scale } => semicircle_cdf(scale * x),
            DensityKind::Numeric { h_coefficients } => {
                let (a, b) = self.support;
                if x <= a {
                    return 0.0;
                }
                if x >= b {
                    return 1.0;
                }
                let (half, mid) = self.half_and_mid();
                let theta = (-(x - mid) / half).clamp(-1.0, 1.0).acos();
                numeric_cdf_theta(h_coefficients, half, theta)
            }
        }
    }

    /// γ_j solving j/N = F(γ_j), for 1 ≤ j ≤ N.
    pub fn quantile_gamma(&self, j: usize, n: usize) -> Result<f64> {
        if n == 0 || j == 0 || j > n {
            return Err(EquilibriumError::Domain(format!("quantile index {j} outside 1..={n}")));
        }
        self.quantile(j as f64 / n as f64)
    }

    /// Inverse CDF at probability `p` in [0, 1], by bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(EquilibriumError::Domain(format!("probability {p} outside [0, 1]")));
        }
        let (a, b) = self.support;
        if p == 1.0 {
            return Ok(b);
        }
        if p == 0.0 {
            return Ok(a);
        }
        let (mut lo, mut hi) = (a, b);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo < 1e-15 {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// All classical locations γ_1, ..., γ_N.
    pub fn classical_locations(&self, n: usize) -> Result<Vec<f64>> {
        (1..=n).map(|j| self.quantile_gamma(j, n)).collect()
    }

    /// ϱ(γ_k), the rescaling density for gaps at index k.
    pub fn density_at_quantile(&self, k: usize, n: usize) -> Result<f64> {
        Ok(self.density(self.quantile_gamma(k, n)?))
    }

    /// `x,rho` CSV on `points` equispaced points of the support.
    pub fn grid_csv(&self, points: usize) -> String {
        let (a, b) = self.support;
        let mut out = String::from("x,rho\n");
        let points = points.max(2);
        for i in 0..points {
            let x = a + (b - a) * i as f64 / (points - 1) as f64;
            let _ = writeln!(out, "{},{}", fmt17(x), fmt17(self.density(x)));
        }
        out
    }

    /// Principal value ∫ ϱ(y)/(x−y) dy via the airfoil identity, for
    /// numeric densities; closed form for the semicircle.
    pub fn hilbert(&self, x: f64) -> f64 {
        match &self.kind {
            DensityKind::Semicircle { scale } => {
                let u = scale * x;
                let inner = if u.abs() <= 2.0 { u / 2.0 } else { (u - u.signum() * (u * u - 4.0).sqrt()) / 2.0 };
                scale * inner
            }
            DensityKind::Numeric { h_coefficients } => {
                let (half, mid) = self.half_and_mid();
                let t = (x - mid) / half;
                // h as a U-series: T_0 = U_0, T_1 = U_1/2, T_k = (U_k − U_{k−2})/2.
                let n = h_coefficients.len();
                let mut u = vec![0.0; n];
                for (k, &c) in h_coefficients.iter().enumerate() {
                    match k {
                        0 => u[0] += c,
                        1 => u[1] += 0.5 * c,
                        _ => {
                            u[k] += 0.5 * c;
                            u[k - 2] -= 0.5 * c;
                        }
                    }
                }
                // PV∫√(1−s²)U_n(s)/(t−s) ds = π T_{n+1}(t) for |t| < 1.
                let mut t_series = vec![0.0; n + 1];
                for (k, un) in u.into_iter().enumerate() {
                    t_series[k + 1] = un;
                }
                let pv = Chebyshev::from_coefficients(-1.0, 1.0, t_series).eval(t);
                half * PI * pv
            }
        }
    }
}

/// ∫_A^x ϱ for x = mid − half·cos θ, in closed form from the Chebyshev
/// coefficients of h.
fn numeric_cdf_theta(c: &[f64], half: f64, theta: f64) -> f64 {
    let s = |m: i64| -> f64 {
        let m = m.unsigned_abs() as f64;
        if m == 0.0 {
            theta
        } else {
            (m * theta).sin() / m
        }
    };
    let mut acc = 0.0;
    for (k, &ck) in c.iter().enumerate() {
        let k = k as i64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += ck * sign * (s(k) - 0.5 * (s(k - 2) + s(k + 2)));
    }
    0.5 * half * half * acc
}

/// Settings for [`solve_equilibrium_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub quadrature_nodes: usize,
    pub h_degree: usize,
    pub initial_support: (f64, f64),
    pub max_newton: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { quadrature_nodes: 256, h_degree: 48, initial_support: (-2.0, 2.0), max_newton: 100 }
    }
}

/// Gauss–Chebyshev nodes on [a, b]; ∫ f w ≈ (π/n) Σ f(y_k) with
/// w = 1/√((b−y)(y−a)).
fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
    (0..n).map(|k| mid + half * (PI * (k as f64 + 0.5) / n as f64).cos()).collect()
}

/// Endpoint conditions: ∫V′w = 0 and (1/2π)∫(y−mid)V′w = 1.
fn endpoint_conditions(v: &PotentialModel, a: f64, b: f64, n: usize) -> [f64; 2] {
    let mid = 0.5 * (a + b);
    let nodes = chebyshev_nodes(a, b, n);
    let w = PI / n as f64;
    let e1: f64 = nodes.iter().map(|&y| v.first(y)).sum::<f64>() * w;
    let e2: f64 = nodes.iter().map(|&y| (y - mid) * v.first(y)).sum::<f64>() * w / (2.0 * PI) - 1.0;
    [e1, e2]
}

/// Solve for the single-interval equilibrium density of `v`.
pub fn solve_equilibrium_density(v: &PotentialModel, settings: SolverSettings) -> Result<EquilibriumDensity> {
    let n = settings.quadrature_nodes;
    let (mut a, mut b) = settings.initial_support;
    let mut converged = false;
    for _ in 0..settings.max_newton {
        let f = endpoint_conditions(v, a, b, n);
        if f[0].abs().max(f[1].abs()) < 1e-14 {
            converged = true;
            break;
        }
        let step = 1e-7 * (b - a);
        let fa = endpoint_conditions(v, a + step, b, n);
        let fb = endpoint_conditions(v, a, b + step, n);
        let j = [[(fa[0] - f[0]) / step, (fb[0] - f[0]) / step], [(fa[1] - f[1]) / step, (fb[1] - f[1]) / step]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !det.is_finite() || det == 0.0 {
            return Err(EquilibriumError::NoConvergence("singular endpoint Jacobian".into()));
        }
        let mut da = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let mut db = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        // Damp steps that would collapse or invert the interval.
        let width = b - a;
        let scale = (0.5 * width / da.abs().max(db.abs()).max(1e-300)).min(1.0);
        da *= scale;
        db *= scale;
        a += da;
        b += db;
        if !(b > a) {
            return Err(EquilibriumError::NoConvergence("support collapsed".into()));
        }
        if da.abs().max(db.abs()) < 1e-15 * (1.0 + a.abs().max(b.abs())) {
            converged = true;
            break;
        }
    }
    if !converged {
        let f = endpoint_conditions(v, a, b, n);
        if f[0].abs().max(f[1].abs()) > 1e-10 {
            return Err(EquilibriumError::NoConvergence(format!("endpoint residual {f:?}")));
        }
    }
    let nodes = chebyshev_nodes(a, b, n);
    let w = PI / n as f64;
    let h_at = |x: f64| -> f64 {
        let s: f64 = nodes
            .iter()
            .map(|&y| {
                let dx = x - y;
                if dx.abs() < 1e-10 * (b - a) {
                    v.second(x)
                } else {
                    (v.first(x) - v.first(y)) / dx
                }
            })
            .sum();
        s * w / (2.0 * PI * PI)
    };
    let h = Chebyshev::fit(h_at, a, b, settings.h_degree);
    for i in 0..=400 {
        let x = a + (b - a) * i as f64 / 400.0;
        let hx = h.eval(x);
        if !(hx > 0.0) {
            return Err(EquilibriumError::UnsupportedPotential(format!(
                "square-root factor h({x}) = {hx} is not positive; single-interval ansatz fails"
            )));
        }
    }
    let mut coeffs = h.coefficients().to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() < 1e-17) {
        coeffs.pop();
    }
    Ok(EquilibriumDensity { support: (a, b), kind: DensityKind::Numeric { h_coefficients: coeffs } })
}

/// Largest |PV∫ϱ(y)/(x−y)dy − V′(x)/2| over `points` interior points.
pub fn euler_lagrange_residual(density: &EquilibriumDensity, v: &PotentialModel, points: usize) -> f64 {
    let (a, b) = density.support();
    (1..points)
        .map(|i| {
            let x = a + (b - a) * i as f64 / points as f64;
            (density.hilbert(x) - 0.5 * v.first(x)).abs()
        })
        .fold(0.0, f64::max)
}

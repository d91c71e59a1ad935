use serde::{Deserialize, Serialize};

use crate::error::{InequalityError, Result};
use crate::lattice::{fractional_energy, hurwitz_zeta, LatticeFunction};

/// ‖f‖_p / (‖f‖₂^{1−(p−2)/(sp)} · [Σ_{i≠j} |f_i − f_j|²/|i − j|^{1+s}]^{(p−2)/(2sp)}).
pub fn gn_ratio(f: &LatticeFunction, p: f64, s: f64) -> Result<f64> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(InequalityError::Domain(format!("p = {p} outside (2, ∞)")));
    }
    if !(s > 1.0 - 2.0 / p && s < 2.0) {
        return Err(InequalityError::Domain(format!("s = {s} outside (1 − 2/p, 2) for p = {p}")));
    }
    if f.is_zero() {
        return Err(InequalityError::Domain("f is identically zero".into()));
    }
    let theta = (p - 2.0) / (s * p);
    let energy = fractional_energy(f, s);
    Ok(f.norm(p) / (f.norm(2.0).powf(1.0 - theta) * energy.powf(0.5 * theta)))
}

/// Symmetric nonnegative couplings on ℤ: `near(i, j)` for 0 < |i − j| ≤
/// `near_range`, and `far/|i − j|²` beyond.
pub struct LatticeKernel {
    near: Box<dyn Fn(i64, i64) -> f64 + Send + Sync>,
    near_range: u64,
    far: f64,
}

impl LatticeKernel {
    pub fn new(near: impl Fn(i64, i64) -> f64 + Send + Sync + 'static, near_range: u64, far: f64) -> Self {
        Self { near: Box::new(near), near_range, far }
    }

    /// B_ij = c/|i − j|².
    pub fn inverse_square(c: f64) -> Self {
        Self::new(move |i, j| c / ((i - j) as f64).powi(2), 0, c)
    }

    pub fn b(&self, i: i64, j: i64) -> f64 {
        let d = i.abs_diff(j);
        if d == 0 {
            0.0
        } else if d <= self.near_range {
            (self.near)(i, j)
        } else {
            self.far / (d as f64).powi(2)
        }
    }

    /// Σ_{j ∉ [lo, hi]} B_ij for lo ≤ i ≤ hi.
    fn outside_row_sum(&self, i: i64, lo: i64, hi: i64) -> f64 {
        let mut total = 0.0;
        // Below: distances from i − lo + 1 on; above: from hi − i + 1 on.
        for first in [(i - lo + 1) as u64, (hi - i + 1) as u64] {
            let mut d = first;
            while d <= self.near_range {
                total += (self.near)(i, i - d as i64);
                d += 1;
            }
            total += self.far * hurwitz_zeta(2.0, d as f64);
        }
        total
    }

    /// Σ_{i ≠ j ∈ ℤ} B_ij |f_i − f_j|² over ordered pairs.
    pub fn dirichlet_sum(&self, f: &LatticeFunction) -> f64 {
        let f = f.trimmed();
        let Some((lo, hi)) = f.support() else { return 0.0 };
        let v = f.values();
        let mut total = 0.0;
        for (a, &fa) in v.iter().enumerate() {
            let i = lo + a as i64;
            for (b, &fb) in v.iter().enumerate().skip(a + 1) {
                total += 2.0 * self.b(i, lo + b as i64) * (fa - fb).powi(2);
            }
            total += 2.0 * fa * fa * self.outside_row_sum(i, lo, hi);
        }
        total
    }

    /// Worst B_ij|i − j|² over pairs with i in `rows` and j in `partners`,
    /// split by whether |i − j| reaches `reach`: (min over all pairs, min
    /// over far pairs). Pairs beyond the near range contribute `far` alone.
    fn floors(&self, rows: (i64, i64), partners: (i64, i64), reach: f64) -> (f64, f64) {
        let r = self.near_range as i64;
        let mut all = f64::INFINITY;
        let mut far = f64::INFINITY;
        let mut take = |d: f64, v: f64| {
            all = all.min(v);
            if d >= reach {
                far = far.min(v);
            }
        };
        for i in (rows.0..=rows.1).take_while(|_| r > 0) {
            for j in (i - r).max(partners.0)..=(i + r).min(partners.1) {
                if j != i {
                    let d = i.abs_diff(j) as f64;
                    take(d, self.b(i, j) * d * d);
                }
            }
        }
        let longest = (partners.1 - rows.0).max(rows.1 - partners.0);
        if longest > r {
            take(longest as f64, self.far);
        }
        (all, far)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnReport {
    /// ‖f‖₄⁴.
    pub lhs: f64,
    /// Σ B_ij |f_i − f_j|² over the relevant pairs.
    pub dirichlet: f64,
    /// ‖f‖₂²·dirichlet/r.
    pub dirichlet_term: f64,
    /// ‖f‖₂⁴/(Lτ); zero for the global form.
    pub leak_term: f64,
    /// ‖f‖_∞⁴/(a b³).
    pub sup_term: f64,
    /// lhs/(dirichlet_term + leak_term + sup_term), the smallest C that
    /// works for this f; zero when f vanishes.
    pub minimal_c: f64,
    pub floors_ok: bool,
    pub smallest_floor: f64,
    pub smallest_far_floor: f64,
}

fn check_constants(a: f64, b: f64, r: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && b <= r && r <= 1.0) {
        return Err(InequalityError::Domain(format!("need a > 0 and 0 < b ≤ r ≤ 1, got a = {a}, b = {b}, r = {r}")));
    }
    Ok(())
}

fn assemble(f: &LatticeFunction, dirichlet: f64, leak_term: f64, a: f64, b: f64, r: f64, floors: (f64, f64)) -> GnReport {
    let l2 = f.norm(2.0).powi(2);
    let lhs = f.norm(4.0).powi(4);
    let dirichlet_term = l2 * dirichlet / r;
    let sup_term = f.norm(f64::INFINITY).powi(4) / (a * b.powi(3));
    let rhs = dirichlet_term + leak_term + sup_term;
    GnReport {
        lhs,
        dirichlet,
        dirichlet_term,
        leak_term,
        sup_term,
        minimal_c: if lhs == 0.0 { 0.0 } else { lhs / rhs },
        floors_ok: floors.0 >= b * (1.0 - 1e-12) && floors.1 >= r * (1.0 - 1e-12),
        smallest_floor: floors.0,
        smallest_far_floor: floors.1,
    }
}

/// ‖f‖₄⁴ against ‖f‖₂² Σ B|∇f|²/r + ‖f‖_∞⁴/(ab³) on all of ℤ. The floors
/// B_ij ≥ b/|i−j|² and B_ij ≥ r/|i−j|² for |i−j| ≥ 1/a are checked for rows
/// in the support.
pub fn gn_global_check(f: &LatticeFunction, kernel: &LatticeKernel, a: f64, b: f64, r: f64) -> Result<GnReport> {
    check_constants(a, b, r)?;
    let dirichlet = kernel.dirichlet_sum(f);
    let floors = match f.trimmed().support() {
        None => (kernel.far, kernel.far),
        Some((lo, hi)) => kernel.floors((lo, hi), (i64::MIN / 4, i64::MAX / 4), 1.0 / a),
    };
    Ok(assemble(f, dirichlet, 0.0, a, b, r, floors))
}

/// The local form on 𝓘 = [Z − L, Z + L]: only pairs inside 𝓘 enter the
/// Dirichlet sum, the term ‖f‖₂⁴/(Lτ) is added, and the floors are checked
/// on the enlarged interval [Z − (1+τ)L, Z + (1+τ)L].
#[allow(clippy::too_many_arguments)]
pub fn gn_local_check(
    f: &LatticeFunction,
    kernel: &LatticeKernel,
    z: i64,
    l: u64,
    tau: f64,
    a: f64,
    b: f64,
    r: f64,
) -> Result<GnReport> {
    check_constants(a, b, r)?;
    if l == 0 || !(tau > 0.0) {
        return Err(InequalityError::Domain(format!("need L ≥ 1 and τ > 0, got L = {l}, τ = {tau}")));
    }
    let (lo, hi) = (z - l as i64, z + l as i64);
    if let Some((s0, s1)) = f.support() {
        if s0 < lo || s1 > hi {
            return Err(InequalityError::Precondition(format!("support [{s0}, {s1}] leaks out of [{lo}, {hi}]")));
        }
    }
    let mut dirichlet = 0.0;
    for i in lo..=hi {
        for j in i + 1..=hi {
            dirichlet += 2.0 * kernel.b(i, j) * (f.at(i) - f.at(j)).powi(2);
        }
    }
    let wide = ((1.0 + tau) * l as f64).floor() as i64;
    let floors = kernel.floors((z - wide, z + wide), (z - wide, z + wide), 1.0 / a);
    let leak_term = f.norm(2.0).powi(4) / (l as f64 * tau);
    Ok(assemble(f, dirichlet, leak_term, a, b, r, floors))
}

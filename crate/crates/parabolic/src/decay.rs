use loggas_dynamics::HessianKernel;
use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};
use crate::propagate::{lp_norm, PropagatorSolution};

/// Largest b with B_jk(s) ≥ b/(j − k)² and W_j(s) ≥ b/d_j at every stored
/// time, where d_j = 1 + distance from offset j to the nearer window end.
pub fn certified_floor(kernel: &HessianKernel) -> f64 {
    let n = kernel.n();
    let mut floor = f64::INFINITY;
    let mut seen = std::collections::HashSet::new();
    for i in 0..kernel.times().len() {
        let frame = kernel.frame(i);
        if !seen.insert(frame as *const _) {
            continue;
        }
        for j in 0..n {
            let d = (j.min(n - 1 - j) + 1) as f64;
            floor = floor.min(frame.w(j) * d);
            for k in j + 1..n {
                let gap = (k - j) as f64;
                floor = floor.min(frame.b(j, k) * gap * gap);
            }
        }
    }
    floor
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    /// Time since the start of the solution.
    pub s: f64,
    pub bound: f64,
    pub attained: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashReport {
    pub p: f64,
    pub q: f64,
    pub b_floor: f64,
    /// Floor actually certified on the kernel.
    pub certified: f64,
    pub precondition_unmet: bool,
    pub rows: Vec<DecayRow>,
    /// Every row has attained ≤ bound·(1 + tolerance).
    pub satisfied: bool,
    /// max attained/bound over rows with s > 0.
    pub worst_ratio: f64,
}

/// Compares ‖u(s)‖_q with (s·b)^{−(1/p − 1/q)}‖u(0)‖_p at every recorded
/// time. When the kernel does not meet the floors for `b_floor` the report
/// is still filled in, with `precondition_unmet` set.
pub fn check_nash_decay(
    solution: &PropagatorSolution,
    kernel: &HessianKernel,
    b_floor: f64,
    p: f64,
    q: f64,
    tolerance: f64,
) -> Result<NashReport> {
    if !(p >= 1.0) || !(q >= p) {
        return Err(ParabolicError::Domain(format!("need 1 ≤ p ≤ q, got p = {p}, q = {q}")));
    }
    if !(b_floor > 0.0) {
        return Err(ParabolicError::Domain(format!("floor b = {b_floor} must be positive")));
    }
    let certified = certified_floor(kernel);
    let exponent = 1.0 / p - 1.0 / q;
    let start_norm = lp_norm(solution.initial(), p);
    let t0 = solution.start();
    let mut rows = Vec::with_capacity(solution.times().len());
    let mut satisfied = true;
    let mut worst_ratio: f64 = 0.0;
    for (t, v) in solution.times().iter().zip(solution.values()) {
        let s = t - t0;
        let bound = if exponent == 0.0 { start_norm } else { (s * b_floor).powf(-exponent) * start_norm };
        let attained = lp_norm(v, q);
        satisfied &= attained <= bound * (1.0 + tolerance);
        if s > 0.0 && bound > 0.0 {
            worst_ratio = worst_ratio.max(attained / bound);
        }
        rows.push(DecayRow { s, bound, attained });
    }
    Ok(NashReport {
        p,
        q,
        b_floor,
        certified,
        precondition_unmet: certified < b_floor * (1.0 - 1e-12),
        rows,
        satisfied,
        worst_ratio,
    })
}

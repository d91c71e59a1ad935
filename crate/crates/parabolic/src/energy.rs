use loggas_dynamics::{HessianKernel, KernelFrame};
use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};
use crate::propagate::PropagatorSolution;

/// 𝔞[u, v] = ½ Σ_{j,k} B_jk (u_k − u_j)(v_k − v_j) + Σ_j u_j W_j v_j.
pub fn quadratic_form(frame: &KernelFrame, u: &[f64], v: &[f64]) -> f64 {
    let n = frame.n();
    let mut total = 0.0;
    for j in 0..n {
        total += u[j] * frame.w(j) * v[j];
        for k in j + 1..n {
            // Each unordered pair appears twice in the half-sum.
            total += frame.b(j, k) * (u[k] - u[j]) * (v[k] - v[j]);
        }
    }
    total
}

/// T_k = −M(1 + 2^{−k}) and ℓ_k = (ℓ/3)(1 − 2^{−k}).
pub fn de_giorgi_level(k: u32, m: f64, ell: f64) -> (f64, f64) {
    let h = 0.5f64.powi(k as i32);
    (-m * (1.0 + h), ell / 3.0 * (1.0 - h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiEnergy {
    pub sup_term: f64,
    pub dissipation_term: f64,
    pub total: f64,
}

/// U_k with u = (v − ψ − ℓ_k)_+:
/// sup_{t ∈ [T_k, 0]} |u(t)|²/(Mℓ_k²) + ∫_{T_k}^0 𝔞(t)[u, u] dt/(Mℓ_k²).
/// Time 0 is the end of the solution; the kernel is read at the solution's
/// recorded times and the integral uses the trapezoid rule on them.
pub fn de_giorgi_energy(
    solution: &PropagatorSolution,
    kernel: &HessianKernel,
    psi: &[f64],
    m: f64,
    t_k: f64,
    ell_k: f64,
) -> Result<DeGiorgiEnergy> {
    let n = kernel.n();
    if psi.len() != n || solution.window().len() != n {
        return Err(ParabolicError::Domain("cutoff, solution and kernel sizes differ".into()));
    }
    if !(ell_k > 0.0) || !(m > 0.0) {
        return Err(ParabolicError::Domain(format!("ℓ_k = {ell_k} and M = {m} must be positive")));
    }
    if !(t_k <= 0.0) {
        return Err(ParabolicError::Domain(format!("T_k = {t_k} must not be positive")));
    }
    let end = solution.end();
    let from = end + t_k;
    if from < solution.start() - 1e-9 * (1.0 + end.abs()) {
        return Err(ParabolicError::Domain(format!(
            "solution starts at {} after T_k = {from}",
            solution.start()
        )));
    }
    let scale = 1.0 / (m * ell_k * ell_k);
    let positive = |v: &[f64]| -> Vec<f64> { v.iter().zip(psi).map(|(x, p)| (x - p - ell_k).max(0.0)).collect() };

    let mut samples: Vec<(f64, Vec<f64>)> = vec![(from, positive(&solution.at(from)?))];
    for (t, v) in solution.times().iter().zip(solution.values()) {
        if *t > from {
            samples.push((*t, positive(v)));
        }
    }
    let sup_term = samples.iter().map(|(_, u)| u.iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max) * scale;
    let forms: Vec<f64> = samples.iter().map(|(t, u)| quadratic_form(kernel.frame_at(*t), u, u)).collect();
    let integral: f64 = samples.windows(2).zip(forms.windows(2)).map(|(s, f)| 0.5 * (s[1].0 - s[0].0) * (f[0] + f[1])).sum();
    let dissipation_term = integral * scale;
    Ok(DeGiorgiEnergy { sup_term, dissipation_term, total: sup_term + dissipation_term })
}

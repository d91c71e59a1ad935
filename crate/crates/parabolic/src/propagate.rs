use std::io::{self, Write};

use loggas_dynamics::{HessianKernel, KernelFrame};
use loggas_model::{fmt17, IndexWindow};
use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ParabolicError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// (I + h𝒜)v_{n+1} = v_n with the kernel frozen over the step.
    ImplicitEuler,
    /// v_{n+1} = exp(−h𝒜)v_n with the kernel frozen over the step; exact
    /// for piecewise-constant kernels.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateParams {
    pub scheme: Scheme,
    /// Largest step. Kernel frame times are always step boundaries.
    pub dt: f64,
    /// Solves ∂_t v = −rate·𝒜(t)v.
    pub rate: f64,
    /// Keep only couplings with |j − k| ≤ band (the short-range part).
    pub band: Option<usize>,
    /// A step with h·rate·max B above `stiffness_limit` is split in two, at
    /// most this many times.
    pub max_refinements: u32,
    pub stiffness_limit: f64,
}

impl Default for PropagateParams {
    fn default() -> Self {
        Self {
            scheme: Scheme::ImplicitEuler,
            dt: 0.1,
            rate: 1.0,
            band: None,
            max_refinements: 20,
            stiffness_limit: 1e12,
        }
    }
}

/// v(t) on a time grid, indexed by window offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSolution {
    window: IndexWindow,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    source: Option<usize>,
}

impl PropagatorSolution {
    pub fn new(window: IndexWindow, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(ParabolicError::Domain("one value vector per time required".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ParabolicError::Domain("solution times must increase".into()));
        }
        if values.iter().any(|v| v.len() != window.len()) {
            return Err(ParabolicError::Domain("value vector length differs from the window".into()));
        }
        Ok(Self { window, times, values, source: None })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Offset of the delta source, when the data started as one.
    pub fn source(&self) -> Option<usize> {
        self.source
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn initial(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn final_values(&self) -> &[f64] {
        &self.values[self.values.len() - 1]
    }

    /// v(t) by linear interpolation between recorded times.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let (a, b) = (self.start(), self.end());
        let slack = 1e-9 * (1.0 + b.abs());
        if t < a - slack || t > b + slack {
            return Err(ParabolicError::Domain(format!("t = {t} outside the solution range [{a}, {b}]")));
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Ok(self.values[0].clone());
        }
        if i == self.times.len() {
            return Ok(self.final_values().to_vec());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let f = (t - t0) / (t1 - t0);
        Ok(self.values[i - 1].iter().zip(&self.values[i]).map(|(u, v)| u * (1.0 - f) + v * f).collect())
    }

    /// `t,index,value` rows with window labels as indices.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,index,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            for (j, x) in self.window.labels().zip(v) {
                writeln!(w, "{},{j},{}", fmt17(*t), fmt17(*x))?;
            }
        }
        Ok(())
    }
}

/// ℓ^p norm; `p = f64::INFINITY` gives the maximum.
pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn delta(n: usize, b: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[b] = 1.0;
    v
}

/// Dense 𝒜 for one frame, optionally restricted to |j − k| ≤ band, and its
/// largest coupling.
pub(crate) fn banded_generator(frame: &KernelFrame, band: Option<usize>) -> (DMatrix<f64>, f64) {
    let n = frame.n();
    let reach = band.unwrap_or(n);
    let mut a = DMatrix::zeros(n, n);
    let mut largest: f64 = 0.0;
    for j in 0..n {
        let mut row = 0.0;
        for k in j.saturating_sub(reach)..(j + reach + 1).min(n) {
            if k != j {
                let b = frame.b(j, k);
                a[(j, k)] = -b;
                row += b;
                largest = largest.max(b);
            }
        }
        a[(j, j)] = row + frame.w(j);
    }
    (a, largest)
}

enum Factor {
    Eigen(SymmetricEigen<f64, Dyn>),
    Cholesky { h: f64, chol: Cholesky<f64, Dyn> },
}

struct Stepper<'k> {
    kernel: &'k HessianKernel,
    params: PropagateParams,
    frame: Option<usize>,
    generator: DMatrix<f64>,
    largest: f64,
    factor: Option<Factor>,
}

impl<'k> Stepper<'k> {
    fn load(&mut self, frame: usize) {
        // Constant kernels share one frame; skip the rebuild.
        let same = self.frame.is_some_and(|f| std::ptr::eq(self.kernel.frame(f), self.kernel.frame(frame)));
        if !same {
            let (a, largest) = banded_generator(self.kernel.frame(frame), self.params.band);
            self.generator = a;
            self.largest = largest;
            self.factor = None;
        }
        self.frame = Some(frame);
    }

    fn advance(&mut self, v: &mut DMatrix<f64>, h: f64, t: f64) -> Result<()> {
        let rh = self.params.rate * h;
        match self.params.scheme {
            Scheme::Exponential => {
                if !matches!(self.factor, Some(Factor::Eigen(_))) {
                    self.factor = Some(Factor::Eigen(self.generator.clone().symmetric_eigen()));
                }
                let Some(Factor::Eigen(e)) = &self.factor else { unreachable!() };
                let mut y = e.eigenvectors.tr_mul(v);
                for (mut row, l) in y.row_iter_mut().zip(e.eigenvalues.iter()) {
                    row *= (-rh * l).exp();
                }
                *v = &e.eigenvectors * y;
            }
            Scheme::ImplicitEuler => {
                let cached = matches!(&self.factor, Some(Factor::Cholesky { h: c, .. }) if *c == rh);
                if !cached {
                    let n = self.generator.nrows();
                    let m = DMatrix::identity(n, n) + &self.generator * rh;
                    let chol = m.cholesky().ok_or_else(|| ParabolicError::Integration {
                        time: t,
                        reason: "I + h𝒜 is not positive definite".into(),
                    })?;
                    self.factor = Some(Factor::Cholesky { h: rh, chol });
                }
                let Some(Factor::Cholesky { chol, .. }) = &self.factor else { unreachable!() };
                chol.solve_mut(v);
            }
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ParabolicError::Integration { time: t, reason: "non-finite value".into() });
        }
        Ok(())
    }
}

/// Solves ∂_t v = −rate·𝒜(t)v on [t0, t1] from `initial`, recording v after
/// every step. The kernel is piecewise constant: frame i holds on
/// [t_i, t_{i+1}) and the last frame from its time on.
pub fn propagate(
    kernel: &HessianKernel,
    initial: &[f64],
    t0: f64,
    t1: f64,
    params: &PropagateParams,
) -> Result<PropagatorSolution> {
    Ok(propagate_many(kernel, &[initial.to_vec()], t0, t1, params)?.remove(0))
}

/// [`propagate`] for several initial vectors at once; each frame is
/// factorized a single time for all of them.
pub fn propagate_many(
    kernel: &HessianKernel,
    initials: &[Vec<f64>],
    t0: f64,
    t1: f64,
    params: &PropagateParams,
) -> Result<Vec<PropagatorSolution>> {
    let n = kernel.n();
    if initials.is_empty() {
        return Ok(Vec::new());
    }
    for initial in initials {
        if initial.len() != n {
            return Err(ParabolicError::Domain(format!("initial vector has {} entries for {n} sites", initial.len())));
        }
        if initial.iter().any(|x| !x.is_finite()) {
            return Err(ParabolicError::Domain("initial vector is not finite".into()));
        }
    }
    if !(params.dt > 0.0) || !(params.rate >= 0.0) {
        return Err(ParabolicError::Domain(format!("dt = {} and rate = {} must be positive", params.dt, params.rate)));
    }
    let times = kernel.times();
    let last = times[times.len() - 1];
    if !(t1 >= t0) || t0 < times[0] || (!kernel.is_constant() && t1 > last) {
        return Err(ParabolicError::Domain(format!(
            "[{t0}, {t1}] not covered by the kernel's range [{}, {last}]",
            times[0]
        )));
    }

    // Breakpoints: t0, every frame time inside (t0, t1), t1.
    let mut breaks = vec![t0];
    breaks.extend(times.iter().copied().filter(|&t| t > t0 && t < t1));
    if t1 > t0 {
        breaks.push(t1);
    }

    let mut stepper = Stepper { kernel, params: *params, frame: None, generator: DMatrix::zeros(0, 0), largest: 0.0, factor: None };
    let m = initials.len();
    let mut v = DMatrix::from_fn(n, m, |i, c| initials[c][i]);
    let mut out_t = vec![t0];
    let mut out_v: Vec<Vec<Vec<f64>>> = initials.iter().map(|x| vec![x.clone()]).collect();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        stepper.load(kernel.index_at(a));
        let mut steps = ((b - a) / params.dt).ceil().max(1.0) as usize;
        let mut refinements = 0;
        while (b - a) / steps as f64 * params.rate * stepper.largest > params.stiffness_limit {
            if refinements == params.max_refinements {
                return Err(ParabolicError::Integration {
                    time: a,
                    reason: format!(
                        "coupling {:e} still too stiff after {refinements} step refinements",
                        stepper.largest
                    ),
                });
            }
            steps *= 2;
            refinements += 1;
        }
        let h = (b - a) / steps as f64;
        for s in 1..=steps {
            let t = if s == steps { b } else { a + s as f64 * h };
            stepper.advance(&mut v, h, t)?;
            out_t.push(t);
            for (c, out) in out_v.iter_mut().enumerate() {
                out.push(v.column(c).iter().copied().collect());
            }
        }
    }
    Ok(out_v
        .into_iter()
        .map(|values| PropagatorSolution { window: kernel.window(), times: out_t.clone(), values, source: None })
        .collect())
}

/// `propagate` from the delta at window offset `b`.
pub fn propagate_delta(
    kernel: &HessianKernel,
    b: usize,
    t0: f64,
    t1: f64,
    params: &PropagateParams,
) -> Result<PropagatorSolution> {
    if b >= kernel.n() {
        return Err(ParabolicError::Domain(format!("source offset {b} outside the window")));
    }
    let mut sol = propagate(kernel, &delta(kernel.n(), b), t0, t1, params)?;
    sol.source = Some(b);
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let v = [3.0, -4.0];
        assert_eq!(lp_norm(&v, 1.0), 7.0);
        assert_eq!(lp_norm(&v, 2.0), 5.0);
        assert_eq!(lp_norm(&v, f64::INFINITY), 4.0);
    }

    #[test]
    fn frame_times_are_step_boundaries() {
        let n = 3;
        let f = |c: f64| KernelFrame::from_fn(n, |_, _| c, vec![0.0; n]).unwrap();
        let k = HessianKernel::new(IndexWindow::full(n), vec![0.0, 0.35, 1.0], vec![f(0.0), f(1.0), f(0.0)]).unwrap();
        let p = PropagateParams { dt: 0.3, ..Default::default() };
        let sol = propagate(&k, &[1.0, 0.0, 0.0], 0.0, 1.0, &p).unwrap();
        assert!(sol.times().contains(&0.35));
        assert_eq!(*sol.times().last().unwrap(), 1.0);
        // No coupling before 0.35.
        let i = sol.times().iter().position(|&t| t == 0.35).unwrap();
        assert_eq!(sol.values()[i], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn stiff_steps_fail_after_refinements() {
        let n = 2;
        let frame = KernelFrame::from_fn(n, |_, _| 1e15, vec![0.0; n]).unwrap();
        let k = HessianKernel::constant(IndexWindow::full(n), frame, vec![0.0]).unwrap();
        let p = PropagateParams { max_refinements: 2, ..Default::default() };
        assert!(matches!(propagate(&k, &[1.0, 0.0], 0.0, 1.0, &p), Err(ParabolicError::Integration { .. })));
    }
}

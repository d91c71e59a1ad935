use loggas_model::{log_eps, IndexWindow, Scaling};
use nalgebra::DMatrix;

use crate::dbm::DbmPath;
use crate::error::{DynamicsError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Couplings {
    /// B_jk = −β·L''(x_k − x_j) with L = log or log_ε.
    Pairwise { x: Vec<f64>, beta: f64, eps: Option<f64> },
    /// Row-major n×n, symmetric, zero diagonal.
    Dense(Vec<f64>),
}

/// Coefficients of 𝒜 = 𝓑 + 𝓦 at one time, where
/// (𝒜v)_j = Σ_k B_jk (v_j − v_k) + W_j v_j. Indices are offsets into the
/// window.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFrame {
    couplings: Couplings,
    w: Vec<f64>,
}

impl KernelFrame {
    /// B_jk = β/(x_j − x_k)² (or the regularized analogue when `eps` is set).
    pub fn pairwise(x: Vec<f64>, beta: f64, eps: Option<f64>, w: Vec<f64>) -> Result<Self> {
        if x.len() != w.len() {
            return Err(DynamicsError::Domain("one weight per particle required".into()));
        }
        if eps.is_none() {
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    if x[i] == x[j] {
                        return Err(DynamicsError::SingularKernel(format!("x[{i}] = x[{j}] = {}", x[i])));
                    }
                }
            }
        }
        check_weights(&w)?;
        Ok(Self { couplings: Couplings::Pairwise { x, beta, eps }, w })
    }

    /// Explicit couplings, row-major.
    pub fn dense(b: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let n = w.len();
        if b.len() != n * n {
            return Err(DynamicsError::Domain(format!("coupling matrix has {} entries, expected {}", b.len(), n * n)));
        }
        for j in 0..n {
            if b[j * n + j] != 0.0 {
                return Err(DynamicsError::Domain(format!("diagonal coupling B[{j},{j}] must be zero")));
            }
            for k in j + 1..n {
                let (u, v) = (b[j * n + k], b[k * n + j]);
                if u != v || !(u >= 0.0) || !u.is_finite() {
                    return Err(DynamicsError::Domain(format!("B[{j},{k}] = {u}, B[{k},{j}] = {v}")));
                }
            }
        }
        check_weights(&w)?;
        Ok(Self { couplings: Couplings::Dense(b), w })
    }

    /// B_jk = f(j, k) for j ≠ k.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64, w: Vec<f64>) -> Result<Self> {
        let mut b = vec![0.0; n * n];
        for j in 0..n {
            for k in j + 1..n {
                let v = f(j, k);
                b[j * n + k] = v;
                b[k * n + j] = v;
            }
        }
        Self::dense(b, w)
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn b(&self, j: usize, k: usize) -> f64 {
        if j == k {
            return 0.0;
        }
        match &self.couplings {
            Couplings::Pairwise { x, beta, eps } => {
                let d = (x[k] - x[j]).abs();
                match eps {
                    None => beta / (d * d),
                    Some(e) => -beta * log_eps(d, *e).2,
                }
            }
            Couplings::Dense(b) => b[j * self.n() + k],
        }
    }

    #[inline]
    pub fn w(&self, j: usize) -> f64 {
        self.w[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Dense 𝒜 = 𝓑 + 𝓦.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut row = 0.0;
            for k in 0..n {
                if k != j {
                    let b = self.b(j, k);
                    a[(j, k)] = -b;
                    row += b;
                }
            }
            a[(j, j)] = row + self.w[j];
        }
        a
    }

    /// Smallest eigenvalue of 𝒜.
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.generator().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    match w.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        Some(j) => Err(DynamicsError::SingularKernel(format!("weight W[{j}] = {} is not a finite nonnegative number", w[j]))),
        None => Ok(()),
    }
}

/// Time-dependent coefficients, piecewise constant between stored times.
#[derive(Debug, Clone)]
pub struct HessianKernel {
    window: IndexWindow,
    times: Vec<f64>,
    frames: Vec<KernelFrame>,
    frame_of: Vec<usize>,
}

impl HessianKernel {
    pub fn new(window: IndexWindow, times: Vec<f64>, frames: Vec<KernelFrame>) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(DynamicsError::Domain("one frame per time required".into()));
        }
        let frame_of = (0..frames.len()).collect();
        Self::assemble(window, times, frames, frame_of)
    }

    /// The same frame at every time of `grid`.
    pub fn constant(window: IndexWindow, frame: KernelFrame, grid: Vec<f64>) -> Result<Self> {
        let frame_of = vec![0; grid.len()];
        Self::assemble(window, grid, vec![frame], frame_of)
    }

    fn assemble(window: IndexWindow, times: Vec<f64>, frames: Vec<KernelFrame>, frame_of: Vec<usize>) -> Result<Self> {
        if times.is_empty() {
            return Err(DynamicsError::Domain("kernel needs at least one time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::Domain("kernel times must increase".into()));
        }
        if frames.iter().any(|f| f.n() != window.len()) {
            return Err(DynamicsError::Domain("frame size differs from the window".into()));
        }
        Ok(Self { window, times, frames, frame_of })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn n(&self) -> usize {
        self.window.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Whether every stored time shares one frame.
    pub fn is_constant(&self) -> bool {
        self.frames.len() == 1
    }

    /// Frame in force at stored time index `i`.
    pub fn frame(&self, i: usize) -> &KernelFrame {
        &self.frames[self.frame_of[i]]
    }

    /// Index of the last stored time ≤ s (clamped to the grid).
    pub fn index_at(&self, s: f64) -> usize {
        self.times.partition_point(|&t| t <= s).saturating_sub(1)
    }

    pub fn frame_at(&self, s: f64) -> &KernelFrame {
        self.frame(self.index_at(s))
    }

    pub fn b(&self, s: f64, j: usize, k: usize) -> f64 {
        self.frame_at(s).b(j, k)
    }

    pub fn w(&self, s: f64, j: usize) -> f64 {
        self.frame_at(s).w(j)
    }
}

/// 𝒜(s) = β∇²E(x(s)) along a microscopic path: B_jk = β/(x_j − x_k)² and
/// W_j = (β/2)U''(x_j), where U is the one-body part of the path's measure
/// (external points, confinement and interpolation weight included).
pub fn build_hessian_kernel(path: &DbmPath) -> Result<HessianKernel> {
    let m = path.measure();
    if m.scaling() != Scaling::Microscopic {
        return Err(DynamicsError::Domain("kernel needs a path in microscopic coordinates".into()));
    }
    let beta = m.beta();
    let frames = path
        .states()
        .iter()
        .map(|s| {
            let x = s.positions().to_vec();
            let w = x.iter().map(|&xi| 0.5 * beta * m.one_body().slope(xi).1).collect();
            KernelFrame::pairwise(x, beta, m.interaction_eps(), w)
        })
        .collect::<Result<Vec<_>>>()?;
    HessianKernel::new(m.window(), path.times().to_vec(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_gap_beta_two() {
        let f = KernelFrame::pairwise(vec![0.0, 1.0], 2.0, None, vec![0.0, 0.0]).unwrap();
        assert_eq!(f.b(0, 1), 2.0);
        assert_eq!(f.b(1, 0), 2.0);
    }

    #[test]
    fn coincident_points_are_singular() {
        let err = KernelFrame::pairwise(vec![0.0, 1.0, 1.0], 1.0, None, vec![0.0; 3]);
        assert!(matches!(err, Err(DynamicsError::SingularKernel(_))));
    }

    #[test]
    fn generator_annihilates_constants_without_weights() {
        let f = KernelFrame::pairwise(vec![0.0, 1.3, 2.1, 4.0], 1.0, None, vec![0.0; 4]).unwrap();
        let a = f.generator();
        for j in 0..4 {
            assert!(a.row(j).sum().abs() < 1e-14);
        }
        assert!(f.smallest_eigenvalue().abs() < 1e-12);
    }

    #[test]
    fn piecewise_constant_lookup() {
        let w = IndexWindow::full(2);
        let frames = vec![
            KernelFrame::pairwise(vec![0.0, 1.0], 1.0, None, vec![0.0; 2]).unwrap(),
            KernelFrame::pairwise(vec![0.0, 2.0], 1.0, None, vec![0.0; 2]).unwrap(),
        ];
        let k = HessianKernel::new(w, vec![0.0, 1.0], frames).unwrap();
        assert_eq!(k.b(0.5, 0, 1), 1.0);
        assert_eq!(k.b(1.0, 0, 1), 0.25);
        assert_eq!(k.b(7.0, 0, 1), 0.25);
    }
}

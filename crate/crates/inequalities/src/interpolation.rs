use crate::error::{InequalityError, Result};
use crate::lattice::{fractional_energy, LatticeFunction};

/// 8-point Gauss–Legendre nodes and weights on [−1, 1].
const NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const MAX_DEPTH: u32 = 48;
const REL_TOL: f64 = 1e-9;

fn gauss_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    NODES.iter().zip(WEIGHTS).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn adapt_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, floor: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (l, r) = (gauss_1d(f, a, m), gauss_1d(f, m, b));
    if (l + r - whole).abs() <= REL_TOL * (l + r).abs().max(floor) {
        return Ok(l + r);
    }
    if depth == MAX_DEPTH {
        return Err(InequalityError::Numeric(format!("1-d refinement exhausted on [{a}, {b}]")));
    }
    Ok(adapt_1d(f, a, m, l, floor, depth + 1)? + adapt_1d(f, m, b, r, floor, depth + 1)?)
}

fn gauss_2d(f: &impl Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64)) -> f64 {
    let (mx, hx) = (0.5 * (x.0 + x.1), 0.5 * (x.1 - x.0));
    let (my, hy) = (0.5 * (y.0 + y.1), 0.5 * (y.1 - y.0));
    let mut total = 0.0;
    for (u, wu) in NODES.iter().zip(WEIGHTS) {
        for (v, wv) in NODES.iter().zip(WEIGHTS) {
            total += wu * wv * f(mx + hx * u, my + hy * v);
        }
    }
    total * hx * hy
}

fn adapt_2d(f: &impl Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), whole: f64, floor: f64, depth: u32) -> Result<f64> {
    let (xm, ym) = (0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1));
    let quads = [((x.0, xm), (y.0, ym)), ((xm, x.1), (y.0, ym)), ((x.0, xm), (ym, y.1)), ((xm, x.1), (ym, y.1))];
    let parts: Vec<f64> = quads.iter().map(|(qx, qy)| gauss_2d(f, *qx, *qy)).collect();
    let sum: f64 = parts.iter().sum();
    if (sum - whole).abs() <= REL_TOL * sum.abs().max(floor) {
        return Ok(sum);
    }
    if depth == MAX_DEPTH {
        return Err(InequalityError::Numeric(format!("2-d refinement exhausted on {x:?} × {y:?}")));
    }
    let mut total = 0.0;
    for ((qx, qy), p) in quads.iter().zip(parts) {
        total += adapt_2d(f, *qx, *qy, p, floor, depth + 1)?;
    }
    Ok(total)
}

/// ∫∫_{ℝ²} |φ(x) − φ(y)|²/|x − y|^{1+s} dx dy for the piecewise-linear
/// interpolation φ of f.
pub fn interpolated_energy(f: &LatticeFunction, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(InequalityError::Domain(format!("s = {s} outside (0, 2)")));
    }
    let f = f.trimmed();
    let Some((lo, hi)) = f.support() else { return Ok(0.0) };
    // φ vanishes outside [A, B]; cells are [A + c, A + c + 1].
    let (a, b) = ((lo - 1) as f64, (hi + 1) as f64);
    let cells = (hi - lo + 2) as usize;
    let node = |c: usize| f.at(lo - 1 + c as i64);
    let phi = |x: f64| {
        let c = ((x - a).floor() as usize).min(cells - 1);
        let t = x - a - c as f64;
        node(c) + (node(c + 1) - node(c)) * t
    };
    let scale = f.norm(2.0).powi(2);
    let floor = 1e-6 * scale;

    // Diagonal cells in closed form: |φ(x) − φ(y)|² = Δ²|x − y|².
    let diag = 2.0 / ((2.0 - s) * (3.0 - s));
    let mut total: f64 = (0..cells).map(|c| (node(c + 1) - node(c)).powi(2) * diag).sum();

    let integrand = |x: f64, y: f64| (phi(x) - phi(y)).powi(2) / (x - y).abs().powf(1.0 + s);
    for c in 0..cells {
        for d in c + 1..cells {
            let x = (a + c as f64, a + c as f64 + 1.0);
            let y = (a + d as f64, a + d as f64 + 1.0);
            let whole = gauss_2d(&integrand, x, y);
            total += 2.0 * adapt_2d(&integrand, x, y, whole, floor, 0)?;
        }
    }

    // x in [A, B], y outside: ∫_{y ∉ [A, B]} |x − y|^{−1−s} dy = ((x−A)^{−s} + (B−x)^{−s})/s.
    let edge = |x: f64| phi(x).powi(2) * ((x - a).powf(-s) + (b - x).powf(-s)) / s;
    for c in 0..cells {
        let (x0, x1) = (a + c as f64, a + c as f64 + 1.0);
        let whole = gauss_1d(&edge, x0, x1);
        total += 2.0 * adapt_1d(&edge, x0, x1, whole, floor, 0)?;
    }
    Ok(total)
}

/// Continuum energy of the interpolation over the lattice energy; zero for
/// the zero function.
pub fn interpolation_comparison(f: &LatticeFunction, s: f64) -> Result<f64> {
    let lattice = fractional_energy(f, s);
    if lattice == 0.0 {
        return Ok(0.0);
    }
    Ok(interpolated_energy(f, s)? / lattice)
}

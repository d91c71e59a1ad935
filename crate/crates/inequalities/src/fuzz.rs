use std::io::{self, Write};

use loggas_model::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::LatticeFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzRow {
    pub trial: usize,
    pub seed: u64,
    pub minimal_c: f64,
}

/// Random f with support length in 1..=`max_len` starting at `offset`:
/// Gaussian values, a quarter of them zeroed.
pub fn random_lattice_function(seed: u64, trial: usize, offset: i64, max_len: usize) -> LatticeFunction {
    let mut rng = stream_rng(seed, trial as u64);
    let len = rng.random_range(1..=max_len.max(1));
    let values = (0..len)
        .map(|_| if rng.random::<f64>() < 0.25 { 0.0 } else { StandardNormal.sample(&mut rng) })
        .collect();
    LatticeFunction::new(offset, values).expect("Gaussian draws are finite")
}

/// Runs `measure` on `trials` random functions in parallel; trial t draws
/// from stream t of `seed`.
pub fn fuzz_sweep(
    trials: usize,
    seed: u64,
    offset: i64,
    max_len: usize,
    measure: impl Fn(&LatticeFunction) -> Result<f64> + Sync,
) -> Result<Vec<FuzzRow>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let f = random_lattice_function(seed, trial, offset, max_len);
            Ok(FuzzRow { trial, seed, minimal_c: measure(&f)? })
        })
        .collect()
}

pub fn running_max(rows: &[FuzzRow]) -> f64 {
    rows.iter().map(|r| r.minimal_c).fold(0.0, f64::max)
}

pub fn write_fuzz_csv<W: Write>(rows: &[FuzzRow], mut w: W) -> io::Result<()> {
    writeln!(w, "trial,seed,minimal_C")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.trial, r.seed, loggas_model::fmt17(r.minimal_c))?;
    }
    Ok(())
}

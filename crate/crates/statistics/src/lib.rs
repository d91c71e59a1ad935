//! Estimators for log-gas observables: rescaled gap laws and their
//! Kolmogorov–Smirnov comparisons, rigidity tails, small-gap repulsion
//! exponents and local level counts.

mod cdf;
mod compare;
mod count;
mod error;
mod gaps;
mod report;
mod tails;

pub use cdf::{ks_distance, ks_to_cdf, EmpiricalCdf};
pub use compare::{ks_bootstrap, universality_compare, BootstrapParams, KsComparison, MIN_COMPARISON_SAMPLES};
pub use count::{level_count, occupancy_probability};
pub use error::{Result, StatsError};
pub use gaps::{gap_distribution, Ensemble, GapSample, BULK_FRACTION};
pub use report::{StatReport, FINITE_N_CAVEAT};
pub use tails::{
    gaussian_tail_fit, level_repulsion_exponent, repulsion_fit, rigidity_tail, GapOrder, RepulsionRange,
    RigidityTail, TailFit, MIN_RIGIDITY_SAMPLES,
};

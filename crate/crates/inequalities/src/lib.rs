//! Discrete Gagliardo–Nirenberg inequalities on ℤ: the fractional form,
//! its global and local kernel versions, and the comparison between a
//! lattice function and its linear interpolation. Each check returns the
//! attained ratio; the fuzz helpers track the largest one over random data.

mod error;
mod fuzz;
mod gn;
mod interpolation;
mod lattice;

pub use error::{InequalityError, Result};
pub use fuzz::{fuzz_sweep, random_lattice_function, running_max, write_fuzz_csv, FuzzRow};
pub use gn::{gn_global_check, gn_local_check, gn_ratio, GnReport, LatticeKernel};
pub use interpolation::{interpolated_energy, interpolation_comparison};
pub use lattice::{fractional_energy, hurwitz_zeta, LatticeFunction};

//! Dyson Brownian motion for log-gas measures, the Hessian kernel it
//! induces, and the path diagnostics (rigidity and gap good sets, space-time
//! regularity of the kernel).

mod averages;
mod dbm;
mod error;
mod good_sets;
mod kernel;
mod regularity;

pub use averages::dyadic_shifts;
pub use dbm::{integrate_dbm, integrate_paths, DbmDiagnostics, DbmParams, DbmPath, GAP_FLOOR};
pub use error::{DynamicsError, Result};
pub use good_sets::{evaluate_good_sets, GoodSetParams, GoodSetReport, QValue};
pub use kernel::{build_hessian_kernel, HessianKernel, KernelFrame};
pub use regularity::{check_regularity_point, check_strong_regularity};

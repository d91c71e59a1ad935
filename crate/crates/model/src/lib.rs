//! Shared vocabulary for log-gas experiments: particle configurations,
//! index windows, confining potentials, frozen boundary data, reference
//! locations and the regularity checker for external potentials.

mod boundary;
mod chebyshev;
mod configuration;
mod error;
mod format;
mod potential;
mod reference;
mod regularity;
mod regularized;
mod rng;

pub use boundary::{external_potential, BoundaryData, ExternalField, PotentialValue};
pub use chebyshev::Chebyshev;
pub use configuration::{IndexWindow, ParticleConfiguration, Scaling};
pub use error::{ModelError, Result};
pub use format::fmt17;
pub use potential::PotentialModel;
pub use reference::{equidistant_alpha, ReferenceLocations};
pub use regularity::{check_regular_potential, derivative_profile, RegularityReport, RegularityTolerances};
pub use regularized::log_eps;
pub use rng::{stream_rng, StreamRng};

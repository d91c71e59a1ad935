//! The linear parabolic system ∂_t v = −𝒜(t)v driven by a Hessian kernel:
//! propagation, the random-walk representation of log-gas covariances, and
//! the decay, finite-speed, Hölder and De Giorgi diagnostics measured on its
//! solutions.

mod cutoffs;
mod decay;
mod energy;
mod error;
mod finite_speed;
mod holder;
mod propagate;
mod representation;

pub use cutoffs::{build_cutoffs, psi, CutoffFamily};
pub use decay::{certified_floor, check_nash_decay, DecayRow, NashReport};
pub use energy::{de_giorgi_energy, de_giorgi_level, quadratic_form, DeGiorgiEnergy};
pub use error::{ParabolicError, Result};
pub use finite_speed::{finite_speed_profile, FiniteSpeedParams, FiniteSpeedReport};
pub use holder::{fit_holder_exponent, holder_oscillation, HolderFit};
pub use propagate::{delta, lp_norm, propagate, propagate_delta, propagate_many, PropagateParams, PropagatorSolution, Scheme};
pub use representation::{
    correlation_via_representation, correlations_via_representation, CorrelationEstimate, LinearObservable,
    Observable, RepresentationParams,
};

//! Reference engines that share no code path with the Monte Carlo pipeline
//! beyond the spectral exponential.

pub mod analytic;
pub mod bloch;
pub mod compare;
pub mod exact;
pub mod fullspace;

pub use bloch::bloch_average_numeric;
pub use compare::subspace_fullspace_deviation;
pub use exact::{build_exact_maps, exact_moment_series, exact_moments_at_step, ExactMomentMaps};
pub use fullspace::{fullspace_evolve, FullSpaceState};

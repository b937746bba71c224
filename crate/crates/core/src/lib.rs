//! Interacting multiple-try Metropolis samplers.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod mathcore;
pub mod proposals;
pub mod samplers;
pub mod real;
pub mod targets;
pub mod trace;
pub mod weights;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision aliases.
pub type Kernel64 = proposals::Kernel<f64>;
pub type Mixture64 = targets::GaussianMixture<f64>;
pub type Population64 = samplers::PopulationState<f64>;
pub type SamplerConfig64 = samplers::SamplerConfig<f64>;
pub type SpdMatrix64 = mathcore::SpdMatrix<f64>;
pub type Trace64 = trace::ChainTrace<f64>;

//! Seeded randomness, dense linear algebra and time-series statistics.

mod linalg;
mod mvn;
mod rng;
mod stats;

pub use linalg::{cholesky, Matrix, SpdMatrix};
pub use mvn::{mvn_logpdf, mvn_sample, wishart_sample};
pub(crate) use mvn::{mvn_logpdf_unchecked, mvn_sample_unchecked};
pub use rng::RngStream;
pub use stats::{acf, iact, mean, variance};

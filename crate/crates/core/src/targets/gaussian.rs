use rand::Rng;

use super::Target;
use crate::error::Result;
use crate::mathcore::{mvn_logpdf_unchecked, mvn_sample_unchecked, SpdMatrix};
use crate::real::Real;

/// Multivariate normal target `N(mean, cov)`.
#[derive(Clone, Debug)]
pub struct Gaussian<T> {
    mean: Vec<T>,
    cov: SpdMatrix<T>,
}

impl<T: Real> Gaussian<T> {
    pub fn new(mean: Vec<T>, cov: SpdMatrix<T>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(crate::Error::DimensionMismatch {
                expected: cov.dim(),
                found: mean.len(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn standard(dim: usize) -> Self {
        Self {
            mean: vec![T::zero(); dim],
            cov: SpdMatrix::identity(dim),
        }
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &SpdMatrix<T> {
        &self.cov
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        mvn_sample_unchecked(rng, &self.mean, &self.cov)
    }
}

impl<T: Real> Target<T> for Gaussian<T> {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn log_density(&self, x: &[T]) -> T {
        mvn_logpdf_unchecked(x, &self.mean, &self.cov)
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        let diff: Vec<T> = x.iter().zip(&self.mean).map(|(&a, &b)| a - b).collect();
        Some(self.cov.solve(&diff).into_iter().map(|v| -v).collect())
    }
}

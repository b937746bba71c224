use rand::Rng;

use super::Target;
use crate::error::{Error, Result};
use crate::real::Real;

/// Finite target on the states `0, 1, …, K-1` of the real line.
///
/// Continuous kernels can be pointed at it unchanged: any point that is not
/// exactly one of the states is off support.
#[derive(Clone, Debug)]
pub struct GridTarget<T> {
    masses: Vec<T>,
    log_masses: Vec<T>,
}

impl<T: Real> GridTarget<T> {
    pub fn new(masses: Vec<T>) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|&m| !(m > T::zero() && m.is_finite())) {
            return Err(Error::InvalidParameter(
                "grid masses must be non-empty and strictly positive".into(),
            ));
        }
        let log_masses = masses.iter().map(|m| m.ln()).collect();
        Ok(Self { masses, log_masses })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn point(&self, state: usize) -> Vec<T> {
        vec![T::from_count(state)]
    }

    /// State index of `x`, if `x` is exactly a grid point.
    pub fn state_of(&self, x: &[T]) -> Option<usize> {
        let v = *x.first()?;
        if x.len() != 1 || v < T::zero() || v.fract() != T::zero() {
            return None;
        }
        let k = v.to_usize()?;
        (k < self.masses.len()).then_some(k)
    }

    pub fn probabilities(&self) -> Vec<T> {
        grid_normalize(&self.masses)
    }

    /// Exact draw of a state index.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let p = self.probabilities();
        let u = T::open_unit(rng);
        let mut acc = T::zero();
        for (k, &pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                return k;
            }
        }
        p.len() - 1
    }
}

impl<T: Real> Target<T> for GridTarget<T> {
    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, x: &[T]) -> T {
        match self.state_of(x) {
            Some(k) => self.log_masses[k],
            None => T::neg_infinity(),
        }
    }
}

/// Masses divided by their sum.
pub fn grid_normalize<T: Real>(masses: &[T]) -> Vec<T> {
    let total: T = masses.iter().copied().sum();
    masses.iter().map(|&m| m / total).collect()
}

use super::Target;
use crate::error::{Error, Result};
use crate::real::Real;

/// `π^ξ` for an exponent `ξ ∈ (0, 1]`.
#[derive(Clone, Debug)]
pub struct Tempered<G, T> {
    base: G,
    exponent: T,
}

impl<T: Real, G: Target<T>> Tempered<G, T> {
    pub fn new(base: G, exponent: T) -> Result<Self> {
        if !(exponent > T::zero() && exponent <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "tempering exponent {exponent} outside (0, 1]"
            )));
        }
        Ok(Self { base, exponent })
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }
}

impl<T: Real, G: Target<T>> Target<T> for Tempered<G, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn log_density(&self, x: &[T]) -> T {
        let v = self.base.log_density(x);
        if v == T::neg_infinity() {
            v
        } else {
            self.exponent * v
        }
    }

    fn in_support(&self, x: &[T]) -> bool {
        self.base.in_support(x)
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        self.base
            .gradient(x)
            .map(|g| g.into_iter().map(|v| v * self.exponent).collect())
    }
}

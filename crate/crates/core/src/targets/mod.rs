//! Unnormalized target densities.

mod betabin;
mod gaussian;
mod grid;
mod mixture;
mod sv;
mod tempered;

use std::sync::Arc;

pub use betabin::{read_loh_csv, BetaBinomialPosterior, LohObservation};
pub use gaussian::Gaussian;
pub use grid::{grid_normalize, GridTarget};
pub use mixture::GaussianMixture;
pub use sv::{
    read_sv_csv, sample_inverse_gamma, LatentLevel, LatentSlice, PhiSlice, SvModel, SvState,
};
pub use tempered::Tempered;

use crate::real::Real;

/// Unnormalized log-density π on ℝ^d.
///
/// `log_density` returns `-inf` off the support and is finite on it.
pub trait Target<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn log_density(&self, x: &[T]) -> T;

    fn in_support(&self, x: &[T]) -> bool {
        self.log_density(x) > T::neg_infinity()
    }

    /// Analytic gradient of the log-density, when available.
    fn gradient(&self, _x: &[T]) -> Option<Vec<T>> {
        None
    }
}

impl<T: Real, G: Target<T> + ?Sized> Target<T> for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[T]) -> T {
        (**self).log_density(x)
    }
    fn in_support(&self, x: &[T]) -> bool {
        (**self).in_support(x)
    }
    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        (**self).gradient(x)
    }
}

impl<T: Real, G: Target<T> + ?Sized> Target<T> for Box<G> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[T]) -> T {
        (**self).log_density(x)
    }
    fn in_support(&self, x: &[T]) -> bool {
        (**self).in_support(x)
    }
    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        (**self).gradient(x)
    }
}

impl<T: Real, G: Target<T> + ?Sized> Target<T> for Arc<G> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[T]) -> T {
        (**self).log_density(x)
    }
    fn in_support(&self, x: &[T]) -> bool {
        (**self).in_support(x)
    }
    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        (**self).gradient(x)
    }
}

/// Central finite-difference gradient of `target.log_density` at `x`.
pub fn finite_difference_gradient<T: Real, G: Target<T> + ?Sized>(
    target: &G,
    x: &[T],
    step: T,
) -> Vec<T> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step * (T::one() + x[i].abs());
            probe[i] = x[i] + h;
            let up = target.log_density(&probe);
            probe[i] = x[i] - h;
            let down = target.log_density(&probe);
            probe[i] = x[i];
            (up - down) / (h + h)
        })
        .collect()
}

/// Analytic gradient when the target has one, otherwise central differences.
pub fn gradient_or_fd<T: Real, G: Target<T> + ?Sized>(target: &G, x: &[T]) -> Vec<T> {
    target
        .gradient(x)
        .unwrap_or_else(|| finite_difference_gradient(target, x, T::of(1e-5)))
}

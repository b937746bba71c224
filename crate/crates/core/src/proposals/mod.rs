//! Trial-generating kernels `T_j(· | context)` with two-way density evaluation.

mod discrete;
mod gaussian;
mod ray;
mod sor;
mod spec;

pub use discrete::DiscreteGaussian;
pub use gaussian::{AnchoredRw, GaussianRw, MixtureRw};
pub use ray::{line_search_mode, ray_direction, LineSearch, RayProposal};
pub use sor::{default_correlation, SorBlock, SorCenter, SorTrial};
pub use spec::KernelSpec;

use crate::error::Result;
use crate::mathcore::RngStream;
use crate::real::Real;

/// What a kernel may condition on when proposing for one chain.
///
/// `snapshot` is the population frozen for the current update; slot `chain`
/// of it is superseded by `current`, so evaluating a density "from y" only
/// needs [`Context::with_current`].
#[derive(Clone, Copy, Debug)]
pub struct Context<'a, T> {
    pub current: &'a [T],
    pub snapshot: &'a [Vec<T>],
    pub chain: Option<usize>,
    pub anchor: Option<usize>,
    pub previous: Option<&'a [T]>,
}

impl<'a, T: Real> Context<'a, T> {
    /// Context for a lone chain with no population.
    pub fn single(current: &'a [T]) -> Self {
        Self {
            current,
            snapshot: &[],
            chain: None,
            anchor: None,
            previous: None,
        }
    }

    pub fn population(current: &'a [T], snapshot: &'a [Vec<T>], chain: usize) -> Self {
        Self {
            current,
            snapshot,
            chain: Some(chain),
            anchor: None,
            previous: None,
        }
    }

    pub fn with_current<'b>(&self, current: &'b [T]) -> Context<'b, T>
    where
        'a: 'b,
    {
        Context {
            current,
            snapshot: self.snapshot,
            chain: self.chain,
            anchor: self.anchor,
            previous: self.previous,
        }
    }

    pub fn with_anchor(mut self, anchor: Option<usize>) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_previous(mut self, previous: Option<&'a [T]>) -> Self {
        self.previous = previous;
        self
    }

    /// Position of chain `k` as seen from this context.
    pub fn position(&self, k: usize) -> &[T] {
        if Some(k) == self.chain {
            self.current
        } else {
            &self.snapshot[k]
        }
    }

    /// Centre of an anchored kernel: the anchor chain's position, or the
    /// current point when no anchor is set.
    pub fn anchor_position(&self) -> &[T] {
        match self.anchor {
            Some(k) => self.position(k),
            None => self.current,
        }
    }

    /// Mean of the population excluding this chain; the current point when
    /// there is nobody else.
    pub fn others_mean(&self) -> Vec<T> {
        let d = self.current.len();
        let mut sum = vec![T::zero(); d];
        let mut count = 0usize;
        for (k, p) in self.snapshot.iter().enumerate() {
            if Some(k) == self.chain {
                continue;
            }
            for (s, &v) in sum.iter_mut().zip(p) {
                *s += v;
            }
            count += 1;
        }
        if count == 0 {
            return self.current.to_vec();
        }
        let n = T::from_count(count);
        sum.into_iter().map(|s| s / n).collect()
    }
}

/// A proposal kernel `T(· | ctx)`.
///
/// Implementations must satisfy positivity symmetry: the density of `y`
/// from `x` is positive iff the density of `x` from `y` is.
pub trait Proposal<T: Real>: Send + Sync {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T>;

    /// Log-density of proposing `y` under `ctx`.
    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T>;
}

impl<T: Real, P: Proposal<T> + ?Sized> Proposal<T> for &P {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        (**self).sample(rng, ctx)
    }
    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        (**self).log_density(y, ctx)
    }
}

/// Closed set of built-in kernels, so heterogeneous slots can share a `Vec`.
#[derive(Clone, Debug)]
pub enum Kernel<T> {
    GaussianRw(GaussianRw<T>),
    MixtureRw(MixtureRw<T>),
    Anchored(AnchoredRw<T>),
    Sor(SorTrial<T>),
    Ray(RayProposal<T>),
    Discrete(DiscreteGaussian<T>),
}

impl<T: Real> Kernel<T> {
    /// Kernel ignores `ctx.current` (only the anchor matters), so forward
    /// and reference densities coincide.
    pub fn is_anchored(&self) -> bool {
        matches!(self, Kernel::Anchored(_))
    }

    /// Largest standard deviation of a single move.
    pub fn max_scale(&self) -> T {
        match self {
            Kernel::GaussianRw(k) => k.cov().max_eigenvalue().sqrt(),
            Kernel::MixtureRw(k) => k
                .covs()
                .iter()
                .map(|c| c.max_eigenvalue().sqrt())
                .fold(T::zero(), T::max),
            Kernel::Anchored(k) => k.cov().max_eigenvalue().sqrt(),
            Kernel::Sor(k) => k.cov().max_eigenvalue().sqrt(),
            Kernel::Ray(k) => k.variance().sqrt(),
            Kernel::Discrete(k) => k.scale() + k.shift().abs(),
        }
    }
}

impl<T: Real> Proposal<T> for Kernel<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        match self {
            Kernel::GaussianRw(k) => k.sample(rng, ctx),
            Kernel::MixtureRw(k) => k.sample(rng, ctx),
            Kernel::Anchored(k) => k.sample(rng, ctx),
            Kernel::Sor(k) => k.sample(rng, ctx),
            Kernel::Ray(k) => k.sample(rng, ctx),
            Kernel::Discrete(k) => k.sample(rng, ctx),
        }
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        match self {
            Kernel::GaussianRw(k) => k.log_density(y, ctx),
            Kernel::MixtureRw(k) => k.log_density(y, ctx),
            Kernel::Anchored(k) => k.log_density(y, ctx),
            Kernel::Sor(k) => k.log_density(y, ctx),
            Kernel::Ray(k) => k.log_density(y, ctx),
            Kernel::Discrete(k) => k.log_density(y, ctx),
        }
    }
}

macro_rules! kernel_from {
    ($variant:ident, $ty:ident) => {
        impl<T> From<$ty<T>> for Kernel<T> {
            fn from(k: $ty<T>) -> Self {
                Kernel::$variant(k)
            }
        }
    };
}

kernel_from!(GaussianRw, GaussianRw);
kernel_from!(MixtureRw, MixtureRw);
kernel_from!(Anchored, AnchoredRw);
kernel_from!(Sor, SorTrial);
kernel_from!(Ray, RayProposal);
kernel_from!(Discrete, DiscreteGaussian);

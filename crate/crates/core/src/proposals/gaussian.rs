use super::{Context, Proposal};
use crate::error::{Error, Result};
use crate::mathcore::{mvn_logpdf_unchecked, mvn_sample_unchecked, RngStream, SpdMatrix};
use crate::real::{log_sum_exp, Real};

fn check_dim<T: Real>(cov: &SpdMatrix<T>, y: &[T]) -> Result<()> {
    if cov.dim() == y.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: cov.dim(),
            found: y.len(),
        })
    }
}

/// Gaussian random walk `N(x, Λ)` centred at the current point.
#[derive(Clone, Debug)]
pub struct GaussianRw<T> {
    cov: SpdMatrix<T>,
}

impl<T: Real> GaussianRw<T> {
    pub fn new(cov: SpdMatrix<T>) -> Self {
        Self { cov }
    }

    pub fn isotropic(dim: usize, variance: T) -> Self {
        Self::new(SpdMatrix::scaled_identity(dim, variance))
    }

    pub fn cov(&self) -> &SpdMatrix<T> {
        &self.cov
    }
}

impl<T: Real> Proposal<T> for GaussianRw<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        mvn_sample_unchecked(rng, ctx.current, &self.cov)
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        check_dim(&self.cov, y)?;
        Ok(mvn_logpdf_unchecked(y, ctx.current, &self.cov))
    }
}

/// Scale mixture of random walks `Σ_j α_j N(x, Λ_j)`.
#[derive(Clone, Debug)]
pub struct MixtureRw<T> {
    weights: Vec<T>,
    log_weights: Vec<T>,
    covs: Vec<SpdMatrix<T>>,
}

impl<T: Real> MixtureRw<T> {
    pub fn new(weights: Vec<T>, covs: Vec<SpdMatrix<T>>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if weights.is_empty()
            || weights.len() != covs.len()
            || weights.iter().any(|&w| !(w >= T::zero()))
            || (total - T::one()).abs() > T::of(1e-9)
        {
            return Err(Error::InvalidParameter(
                "mixture proposal weights must be a simplex matching the covariances".into(),
            ));
        }
        let d = covs[0].dim();
        if let Some(c) = covs.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(Self {
            weights,
            log_weights,
            covs,
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn covs(&self) -> &[SpdMatrix<T>] {
        &self.covs
    }
}

impl<T: Real> Proposal<T> for MixtureRw<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        let u = T::open_unit(rng);
        let mut acc = T::zero();
        let mut k = self.weights.len() - 1;
        for (j, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = j;
                break;
            }
        }
        mvn_sample_unchecked(rng, ctx.current, &self.covs[k])
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        check_dim(&self.covs[0], y)?;
        let terms: Vec<T> = self
            .log_weights
            .iter()
            .zip(&self.covs)
            .map(|(&lw, c)| lw + mvn_logpdf_unchecked(y, ctx.current, c))
            .collect();
        Ok(log_sum_exp(&terms))
    }
}

/// `N(x^{(I)}, Λ)` centred at the anchor chain's snapshot position.
///
/// The density never looks at `ctx.current` unless the anchor is the chain
/// itself.
#[derive(Clone, Debug)]
pub struct AnchoredRw<T> {
    cov: SpdMatrix<T>,
}

impl<T: Real> AnchoredRw<T> {
    pub fn new(cov: SpdMatrix<T>) -> Self {
        Self { cov }
    }

    pub fn isotropic(dim: usize, variance: T) -> Self {
        Self::new(SpdMatrix::scaled_identity(dim, variance))
    }

    pub fn cov(&self) -> &SpdMatrix<T> {
        &self.cov
    }
}

impl<T: Real> Proposal<T> for AnchoredRw<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        mvn_sample_unchecked(rng, ctx.anchor_position(), &self.cov)
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        check_dim(&self.cov, y)?;
        Ok(mvn_logpdf_unchecked(y, ctx.anchor_position(), &self.cov))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::{mvn_logpdf, variance};

    #[test]
    fn rw_sample_covariance() {
        let k = GaussianRw::<f64>::isotropic(2, 1.0);
        let mut rng = RngStream::new(1, 0);
        let x = [0.0, 0.0];
        let ctx = Context::single(&x[..]);
        let draws: Vec<Vec<f64>> = (0..100_000).map(|_| k.sample(&mut rng, &ctx)).collect();
        let a: Vec<f64> = draws.iter().map(|d| d[0]).collect();
        let b: Vec<f64> = draws.iter().map(|d| d[1]).collect();
        assert!((variance(&a) - 1.0).abs() < 0.05);
        assert!((variance(&b) - 1.0).abs() < 0.05);
        let cov = a.iter().zip(&b).map(|(u, v)| u * v).sum::<f64>() / a.len() as f64;
        assert!(cov.abs() < 0.05);
    }

    #[test]
    fn rw_is_symmetric() {
        let k = GaussianRw::new(SpdMatrix::diagonal(&[0.3, 2.0]).unwrap());
        let mut rng = RngStream::new(2, 0);
        for _ in 0..100 {
            let x = [f64::standard_normal(&mut rng) * 3.0, f64::standard_normal(&mut rng)];
            let y = [f64::standard_normal(&mut rng), f64::standard_normal(&mut rng) * 5.0];
            let a = k.log_density(&y, &Context::single(&x[..])).unwrap();
            let b = k.log_density(&x, &Context::single(&y[..])).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_density_is_log_sum_exp() {
        let covs: Vec<SpdMatrix<f64>> = [0.1, 5.0, 50.0, 100.0]
            .iter()
            .map(|&s| SpdMatrix::scaled_identity(2, s))
            .collect();
        let k = MixtureRw::new(vec![0.25; 4], covs.clone()).unwrap();
        let x = [1.0, -2.0];
        let y = [3.0, 0.5];
        let direct = covs
            .iter()
            .map(|c| 0.25 * mvn_logpdf(&y, &x, c).unwrap().exp())
            .sum::<f64>()
            .ln();
        let v = k.log_density(&y, &Context::single(&x[..])).unwrap();
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn anchored_ignores_current() {
        let k = AnchoredRw::<f64>::isotropic(2, 1.0);
        let snapshot = vec![vec![10.0, 10.0], vec![0.0, 0.0]];
        let a = [0.0, 0.0];
        let b = [-4.0, 7.0];
        let ctx_a = Context::population(&a[..], &snapshot, 1).with_anchor(Some(0));
        let ctx_b = ctx_a.with_current(&b[..]);
        let y = [9.0, 11.5];
        assert_eq!(
            k.log_density(&y, &ctx_a).unwrap(),
            k.log_density(&y, &ctx_b).unwrap()
        );
        let mut rng = RngStream::new(3, 0);
        let n = 100_000;
        let mut s = [0.0; 2];
        for _ in 0..n {
            let d = k.sample(&mut rng, &ctx_a);
            s[0] += d[0];
            s[1] += d[1];
        }
        assert!((s[0] / n as f64 - 10.0).abs() < 0.02);
        assert!((s[1] / n as f64 - 10.0).abs() < 0.02);
    }

    #[test]
    fn anchored_to_self_follows_current() {
        let k = AnchoredRw::<f64>::isotropic(1, 1.0);
        let snapshot = vec![vec![5.0], vec![-5.0]];
        let x = [0.5];
        let ctx = Context::population(&x[..], &snapshot, 1).with_anchor(Some(1));
        assert_eq!(ctx.anchor_position(), &[0.5]);
        let v = k.log_density(&[0.5], &ctx).unwrap();
        assert!((v + 0.5 * std::f64::consts::TAU.ln()).abs() < 1e-12);
    }
}

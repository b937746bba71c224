use rand::Rng;

use super::Target;
use crate::error::{Error, Result};
use crate::mathcore::{mvn_logpdf_unchecked, mvn_sample_unchecked, wishart_sample, SpdMatrix};
use crate::real::{log_sum_exp, Real};

/// Finite mixture of Gaussians `Σ_k w_k N(μ_k, Σ_k)`.
#[derive(Clone, Debug)]
pub struct GaussianMixture<T> {
    weights: Vec<T>,
    log_weights: Vec<T>,
    means: Vec<Vec<T>>,
    covs: Vec<SpdMatrix<T>>,
}

impl<T: Real> GaussianMixture<T> {
    pub fn new(weights: Vec<T>, means: Vec<Vec<T>>, covs: Vec<SpdMatrix<T>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != covs.len() {
            return Err(Error::InvalidParameter(
                "mixture needs matching, non-empty weights, means and covariances".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if weights.iter().any(|&w| !(w >= T::zero()))
            || (total - T::one()).abs() > T::of(1e-9)
        {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must lie on the simplex (sum = {total})"
            )));
        }
        let d = means[0].len();
        for (m, c) in means.iter().zip(&covs) {
            if m.len() != d || c.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: if m.len() != d { m.len() } else { c.dim() },
                });
            }
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(Self {
            weights,
            log_weights,
            means,
            covs,
        })
    }

    /// `(1/3) N₂((0,0), diag(0.1, 0.5)) + (2/3) N₂((10,10), diag(0.5, 0.1))`.
    pub fn bimodal_2d() -> Self {
        let third = T::one() / T::of(3.0);
        Self::new(
            vec![third, T::one() - third],
            vec![vec![T::zero(); 2], vec![T::of(10.0); 2]],
            vec![
                SpdMatrix::diagonal(&[T::of(0.1), T::of(0.5)]).expect("spd"),
                SpdMatrix::diagonal(&[T::of(0.5), T::of(0.1)]).expect("spd"),
            ],
        )
        .expect("valid mixture")
    }

    /// Two-component mixture in `dim` dimensions with means `(3,…,3)` and
    /// `(10,…,10)`, weights 1/3 and 2/3, and covariances drawn independently
    /// from `W_dim(dof, I)`.
    pub fn wishart_bimodal<R: Rng + ?Sized>(rng: &mut R, dim: usize, dof: T) -> Result<Self> {
        let identity = SpdMatrix::identity(dim);
        let c1 = wishart_sample(rng, dof, &identity)?;
        let c2 = wishart_sample(rng, dof, &identity)?;
        let third = T::one() / T::of(3.0);
        Self::new(
            vec![third, T::one() - third],
            vec![vec![T::of(3.0); dim], vec![T::of(10.0); dim]],
            vec![c1, c2],
        )
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<T>] {
        &self.means
    }

    pub fn covs(&self) -> &[SpdMatrix<T>] {
        &self.covs
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    /// `Σ_k w_k μ_k`.
    pub fn mean(&self) -> Vec<T> {
        let d = self.means[0].len();
        (0..d)
            .map(|i| {
                self.weights
                    .iter()
                    .zip(&self.means)
                    .map(|(&w, m)| w * m[i])
                    .sum()
            })
            .collect()
    }

    /// Per-component log-density terms `log w_k + log N(x; μ_k, Σ_k)`.
    pub fn component_log_terms(&self, x: &[T]) -> Vec<T> {
        self.log_weights
            .iter()
            .zip(self.means.iter().zip(&self.covs))
            .map(|(&lw, (m, c))| lw + mvn_logpdf_unchecked(x, m, c))
            .collect()
    }

    /// Exact draw: pick a component by weight, then draw from it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let k = self.sample_component(rng);
        mvn_sample_unchecked(rng, &self.means[k], &self.covs[k])
    }

    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::open_unit(rng);
        let mut acc = T::zero();
        for (k, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return k;
            }
        }
        self.weights.len() - 1
    }
}

impl<T: Real> Target<T> for GaussianMixture<T> {
    fn dim(&self) -> usize {
        self.means[0].len()
    }

    fn log_density(&self, x: &[T]) -> T {
        log_sum_exp(&self.component_log_terms(x))
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        let terms = self.component_log_terms(x);
        let total = log_sum_exp(&terms);
        let mut g = vec![T::zero(); x.len()];
        for ((t, m), c) in terms.iter().zip(&self.means).zip(&self.covs) {
            let r = (*t - total).exp();
            if r == T::zero() {
                continue;
            }
            let diff: Vec<T> = x.iter().zip(m).map(|(&a, &b)| a - b).collect();
            for (gi, v) in g.iter_mut().zip(c.solve(&diff)) {
                *gi -= r * v;
            }
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::{mvn_logpdf, RngStream};
    use crate::targets::finite_difference_gradient;

    #[test]
    fn origin_value_dominated_by_first_mode() {
        let t = GaussianMixture::<f64>::bimodal_2d();
        let first = (1.0f64 / 3.0).ln()
            + mvn_logpdf(&[0.0, 0.0], &[0.0, 0.0], &SpdMatrix::diagonal(&[0.1, 0.5]).unwrap())
                .unwrap();
        let second = (2.0f64 / 3.0).ln()
            + mvn_logpdf(
                &[0.0, 0.0],
                &[10.0, 10.0],
                &SpdMatrix::diagonal(&[0.5, 0.1]).unwrap(),
            )
            .unwrap();
        let v = t.log_density(&[0.0, 0.0]);
        let direct = (first.exp() + second.exp()).ln();
        assert!((v - direct).abs() < 1e-12);
        assert!((v - first).abs() < 1e-12);
    }

    #[test]
    fn single_component_matches_mvn() {
        let c = SpdMatrix::diagonal(&[2.0, 0.3]).unwrap();
        let t = GaussianMixture::new(vec![1.0], vec![vec![1.0, -1.0]], vec![c.clone()]).unwrap();
        for x in [[0.0, 0.0], [3.0, 1.0], [-2.0, 0.5]] {
            let a: f64 = t.log_density(&x);
            let b = mvn_logpdf(&x, &[1.0, -1.0], &c).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mixture_mean_by_direct_sampling() {
        let t = GaussianMixture::<f64>::bimodal_2d();
        let m = t.mean();
        assert!((m[0] - 20.0 / 3.0).abs() < 1e-12 && (m[1] - 20.0 / 3.0).abs() < 1e-12);
        let mut rng = RngStream::new(21, 0);
        let n = 1_000_000;
        let mut s = [0.0; 2];
        for _ in 0..n {
            let x = t.sample(&mut rng);
            s[0] += x[0];
            s[1] += x[1];
        }
        // sd of the mean ≈ 4.7/1000
        assert!((s[0] / n as f64 - 20.0 / 3.0).abs() < 0.03);
        assert!((s[1] / n as f64 - 20.0 / 3.0).abs() < 0.03);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = GaussianMixture::<f64>::bimodal_2d();
        let mut rng = RngStream::new(4, 0);
        for _ in 0..100 {
            let x = t.sample(&mut rng);
            let g = t.gradient(&x).unwrap();
            let fd = finite_difference_gradient(&t, &x, 1e-6);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-5 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_bad_weights() {
        let c = SpdMatrix::<f64>::identity(1);
        assert!(GaussianMixture::new(vec![0.5, 0.6], vec![vec![0.0], vec![1.0]], vec![c.clone(), c.clone()]).is_err());
        assert!(GaussianMixture::new(vec![1.0], vec![vec![0.0, 0.0]], vec![c]).is_err());
    }
}

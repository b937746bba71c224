use rand::Rng;

use super::linalg::{Matrix, SpdMatrix};
use crate::error::{Error, Result};
use crate::real::Real;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Draws from `N(mean, cov)`.
pub fn mvn_sample<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[T],
    cov: &SpdMatrix<T>,
) -> Result<Vec<T>> {
    check_dim(cov.dim(), mean.len())?;
    Ok(mvn_sample_unchecked(rng, mean, cov))
}

#[inline]
pub(crate) fn mvn_sample_unchecked<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[T],
    cov: &SpdMatrix<T>,
) -> Vec<T> {
    let z: Vec<T> = (0..mean.len()).map(|_| T::standard_normal(rng)).collect();
    cov.correlate(&z)
        .into_iter()
        .zip(mean)
        .map(|(a, &m)| a + m)
        .collect()
}

/// Exact Gaussian log-density of `x` under `N(mean, cov)`.
pub fn mvn_logpdf<T: Real>(x: &[T], mean: &[T], cov: &SpdMatrix<T>) -> Result<T> {
    check_dim(cov.dim(), mean.len())?;
    check_dim(cov.dim(), x.len())?;
    Ok(mvn_logpdf_unchecked(x, mean, cov))
}

#[inline]
pub(crate) fn mvn_logpdf_unchecked<T: Real>(x: &[T], mean: &[T], cov: &SpdMatrix<T>) -> T {
    let d = x.len();
    let diff: Vec<T> = x.iter().zip(mean).map(|(&a, &b)| a - b).collect();
    let q = cov.quadratic_form(&diff);
    -T::of(0.5) * (T::from_count(d) * (T::TAU()).ln() + cov.log_det() + q)
}

/// Wishart draw with `dof` degrees of freedom and the given scale, via the
/// Bartlett decomposition.
pub fn wishart_sample<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dof: T,
    scale: &SpdMatrix<T>,
) -> Result<SpdMatrix<T>> {
    let d = scale.dim();
    if !(dof > T::from_count(d) - T::one()) {
        return Err(Error::InvalidParameter(format!(
            "wishart degrees of freedom {dof} must exceed dimension - 1 = {}",
            d as i64 - 1
        )));
    }
    let half = T::of(0.5);
    let two = T::of(2.0);
    let mut a = Matrix::zeros(d, d);
    for i in 0..d {
        // chi-square with dof - i degrees of freedom
        let k = dof - T::from_count(i);
        a[(i, i)] = T::sample_gamma(rng, k * half, two).sqrt();
        for j in 0..i {
            a[(i, j)] = T::standard_normal(rng);
        }
    }
    let la = scale.cholesky().matmul(&a)?;
    let mut w = la.matmul(&la.transpose())?;
    // exact symmetry; the product can differ in the last ulp
    for i in 0..d {
        for j in 0..i {
            let v = (w[(i, j)] + w[(j, i)]) * half;
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    SpdMatrix::new(w)
}

use crate::error::{Error, Result};
use crate::mathcore::SpdMatrix;
use crate::real::Real;

/// A mode ball: centre plus the covariance defining its Mahalanobis metric.
#[derive(Clone, Debug)]
pub struct Mode<T> {
    pub center: Vec<T>,
    pub cov: SpdMatrix<T>,
}

impl<T: Real> Mode<T> {
    pub fn new(center: Vec<T>, cov: SpdMatrix<T>) -> Result<Self> {
        if center.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                found: center.len(),
            });
        }
        Ok(Self { center, cov })
    }

    /// Unit-covariance (Euclidean) ball.
    pub fn euclidean(center: Vec<T>) -> Self {
        let d = center.len();
        Self {
            center,
            cov: SpdMatrix::identity(d),
        }
    }

    fn distance(&self, x: &[T]) -> T {
        let diff: Vec<T> = x.iter().zip(&self.center).map(|(&a, &b)| a - b).collect();
        self.cov.quadratic_form(&diff).sqrt()
    }
}

/// Fractions of `samples` within Mahalanobis `radius` of each mode, with
/// the remainder last.
///
/// Balls that could intersect (centre distance below `radius` times the sum
/// of the largest standard deviations) are rejected.
pub fn mode_occupancy<T: Real>(samples: &[Vec<T>], modes: &[Mode<T>], radius: T) -> Result<Vec<T>> {
    if !(radius > T::zero()) {
        return Err(Error::Configuration(format!("radius must be positive, got {radius}")));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples for occupancy".into()));
    }
    if modes.is_empty() {
        return Err(Error::Configuration("no mode centres given".into()));
    }
    let d = modes[0].center.len();
    for m in modes {
        if m.center.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.center.len(),
            });
        }
    }
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate().skip(i + 1) {
            let gap = a
                .center
                .iter()
                .zip(&b.center)
                .map(|(&p, &q)| (p - q) * (p - q))
                .sum::<T>()
                .sqrt();
            let reach = radius * (a.cov.max_eigenvalue().sqrt() + b.cov.max_eigenvalue().sqrt());
            if gap < reach {
                return Err(Error::Configuration(format!(
                    "mode balls {} and {} overlap at radius {radius}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut counts = vec![0usize; modes.len() + 1];
    for x in samples {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        let hit = modes.iter().position(|m| m.distance(x) <= radius);
        counts[hit.unwrap_or(modes.len())] += 1;
    }
    let n = T::from_count(samples.len());
    Ok(counts.into_iter().map(|c| T::from_count(c) / n).collect())
}

/// Index of the nearest centre (Euclidean).
pub fn nearest_mode<T: Real>(x: &[T], centers: &[Vec<T>]) -> usize {
    let dist = |c: &Vec<T>| -> T { x.iter().zip(c).map(|(&a, &b)| (a - b) * (a - b)).sum() };
    let mut best = 0;
    for (k, c) in centers.iter().enumerate().skip(1) {
        if dist(c) < dist(&centers[best]) {
            best = k;
        }
    }
    best
}

/// Number of times a path switches its nearest centre.
pub fn mode_jumps<T: Real>(path: &[Vec<T>], centers: &[Vec<T>]) -> usize {
    path.windows(2)
        .filter(|w| nearest_mode(&w[0], centers) != nearest_mode(&w[1], centers))
        .count()
}

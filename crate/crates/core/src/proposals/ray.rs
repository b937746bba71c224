use super::{Context, Proposal};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::real::Real;
use crate::targets::Target;

/// Unit vector pointing from `anchor` toward `mode`.
pub fn ray_direction<T: Real>(mode: &[T], anchor: &[T]) -> Result<Vec<T>> {
    if mode.len() != anchor.len() {
        return Err(Error::DimensionMismatch {
            expected: anchor.len(),
            found: mode.len(),
        });
    }
    let diff: Vec<T> = mode.iter().zip(anchor).map(|(&a, &b)| a - b).collect();
    let norm = diff.iter().map(|&v| v * v).sum::<T>().sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    Ok(diff.into_iter().map(|v| v / norm).collect())
}

/// Result of a one-dimensional mode search along `x + r·u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSearch<T> {
    pub point: Vec<T>,
    pub r: T,
    pub log_density: T,
    /// False when the best value sat at the edge of the scanned range.
    pub bracketed: bool,
}

const SCAN_MIN: f64 = 1e-3;
const SCAN_MAX: f64 = 1e3;
const SCAN_RATIO: f64 = 1.05;
const GOLDEN_TOL: f64 = 1e-6;

fn scan_grid<T: Real>() -> Vec<T> {
    let mut pos = Vec::new();
    let mut r = SCAN_MIN;
    while r < SCAN_MAX {
        pos.push(r);
        r *= SCAN_RATIO;
    }
    pos.push(SCAN_MAX);
    let mut grid: Vec<T> = pos.iter().rev().map(|&r| T::of(-r)).collect();
    grid.push(T::zero());
    grid.extend(pos.iter().map(|&r| T::of(r)));
    grid
}

/// Maximises `log π(x + r·u)` over `r`: a geometric scan of
/// `±[1e-3, 1e3]` locates the best cell, then golden-section search refines
/// it to `1e-6`.
pub fn line_search_mode<T: Real, G: Target<T> + ?Sized>(
    target: &G,
    x: &[T],
    u: &[T],
) -> Result<LineSearch<T>> {
    if x.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: u.len(),
        });
    }
    if u.iter().all(|&v| v == T::zero()) {
        return Err(Error::DegenerateDirection);
    }
    let at = |r: T| -> Vec<T> { x.iter().zip(u).map(|(&a, &b)| a + r * b).collect() };
    let f = |r: T| -> T {
        let v = target.log_density(&at(r));
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    };
    let f0 = f(T::zero());
    if !f0.is_finite() {
        return Err(Error::InvalidParameter(
            "line search start point has non-finite log-density".into(),
        ));
    }

    let grid = scan_grid::<T>();
    let values: Vec<T> = grid.iter().map(|&r| f(r)).collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let bracketed = best > 0 && best + 1 < grid.len();
    if !bracketed {
        return Ok(LineSearch {
            point: at(grid[best]),
            r: grid[best],
            log_density: values[best],
            bracketed: false,
        });
    }

    let inv_phi = T::of((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > T::of(GOLDEN_TOL) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut r = (a + b) / T::of(2.0);
    let mut fr = f(r);
    // Never return something worse than the scan found.
    if values[best] > fr {
        r = grid[best];
        fr = values[best];
    }
    Ok(LineSearch {
        point: at(r),
        r,
        log_density: fr,
        bracketed: true,
    })
}

/// Trial `x + r·e` with `r ~ N(0, σ²)` along a fixed unit direction.
///
/// The density is that of the signed coordinate `r`; points off the line
/// through the current point are an error.
#[derive(Clone, Debug)]
pub struct RayProposal<T> {
    direction: Vec<T>,
    variance: T,
}

impl<T: Real> RayProposal<T> {
    pub fn new(direction: Vec<T>, variance: T) -> Result<Self> {
        let norm = direction.iter().map(|&v| v * v).sum::<T>().sqrt();
        if (norm - T::one()).abs() > T::of(1e-9) {
            return Err(Error::InvalidParameter(format!(
                "ray direction must have unit norm, got {norm}"
            )));
        }
        if !(variance > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "ray variance must be positive, got {variance}"
            )));
        }
        Ok(Self {
            direction,
            variance,
        })
    }

    pub fn direction(&self) -> &[T] {
        &self.direction
    }

    pub fn variance(&self) -> T {
        self.variance
    }
}

impl<T: Real> Proposal<T> for RayProposal<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        let r = T::standard_normal(rng) * self.variance.sqrt();
        ctx.current
            .iter()
            .zip(&self.direction)
            .map(|(&x, &e)| x + r * e)
            .collect()
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        if y.len() != self.direction.len() || ctx.current.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: self.direction.len(),
                found: y.len(),
            });
        }
        let diff: Vec<T> = y.iter().zip(ctx.current).map(|(&a, &b)| a - b).collect();
        let r: T = diff.iter().zip(&self.direction).map(|(&a, &e)| a * e).sum();
        let off = diff
            .iter()
            .zip(&self.direction)
            .map(|(&a, &e)| (a - r * e).abs())
            .fold(T::zero(), T::max);
        let scale = ctx.current.iter().fold(T::one(), |m, &v| m.max(v.abs())) + r.abs();
        if off > T::of(1e-9) * scale {
            return Err(Error::OffRay {
                distance: off.as_f64(),
            });
        }
        Ok(-T::of(0.5) * (r * r / self.variance + (T::TAU() * self.variance).ln()))
    }
}

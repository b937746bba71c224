use super::{Context, Proposal};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::real::{log_sum_exp, Real};

/// Discretised Gaussian over integer offsets, applied independently per
/// coordinate: `P(y = x + k) ∝ exp(-(k - shift)² / 2s²)` for `|k| ≤ K`.
///
/// The offset range is symmetric so positivity symmetry holds even with a
/// shift, which makes the kernel asymmetric in value but not in support.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian<T> {
    scale: T,
    shift: T,
    reach: i64,
    log_probs: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> DiscreteGaussian<T> {
    pub fn new(scale: T, shift: T) -> Result<Self> {
        if !(scale > T::zero()) || !shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "discrete kernel needs scale > 0 and finite shift, got ({scale}, {shift})"
            )));
        }
        let reach = (shift.abs() + T::of(8.0) * scale).ceil().as_f64().max(1.0) as i64;
        let two_s2 = T::of(2.0) * scale * scale;
        let raw: Vec<T> = (-reach..=reach)
            .map(|k| {
                let z = T::of(k as f64) - shift;
                -z * z / two_s2
            })
            .collect();
        let norm = log_sum_exp(&raw);
        let log_probs: Vec<T> = raw.iter().map(|&v| v - norm).collect();
        let mut acc = T::zero();
        let cumulative = log_probs
            .iter()
            .map(|&lp| {
                acc += lp.exp();
                acc
            })
            .collect();
        Ok(Self {
            scale,
            shift,
            reach,
            log_probs,
            cumulative,
        })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn shift(&self) -> T {
        self.shift
    }

    /// Largest offset magnitude with positive mass.
    pub fn reach(&self) -> i64 {
        self.reach
    }

    /// Log-probability of the integer offset `k`.
    pub fn log_prob(&self, k: i64) -> T {
        if k.abs() > self.reach {
            T::neg_infinity()
        } else {
            self.log_probs[(k + self.reach) as usize]
        }
    }

    fn draw_offset(&self, rng: &mut RngStream) -> i64 {
        let u = T::open_unit(rng) * *self.cumulative.last().unwrap();
        let idx = self.cumulative.partition_point(|&c| c < u);
        idx.min(self.cumulative.len() - 1) as i64 - self.reach
    }
}

impl<T: Real> Proposal<T> for DiscreteGaussian<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        ctx.current
            .iter()
            .map(|&x| x + T::of(self.draw_offset(rng) as f64))
            .collect()
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        if y.len() != ctx.current.len() {
            return Err(Error::DimensionMismatch {
                expected: ctx.current.len(),
                found: y.len(),
            });
        }
        let mut total = T::zero();
        for (&yi, &xi) in y.iter().zip(ctx.current) {
            let d = yi - xi;
            let k = d.round();
            if (d - k).abs() > T::of(1e-9) {
                return Ok(T::neg_infinity());
            }
            total += self.log_prob(k.as_f64() as i64);
        }
        Ok(total)
    }
}

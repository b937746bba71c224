//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};

/// Floating-point scalar used by targets, kernels and samplers.
///
/// Besides the usual `num-traits` arithmetic this carries the handful of
/// random variates and special functions the samplers need, so generic code
/// never has to spell out `rand_distr` distribution bounds.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; lossy for narrower types.
    fn of(v: f64) -> Self;

    /// Widens to `f64` for reporting and IO.
    fn as_f64(self) -> f64;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform draw on the open interval (0, 1).
    fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma draw with the given shape and scale (mean `shape * scale`).
    fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: Self, scale: Self) -> Self;

    /// Natural log of the gamma function for positive arguments; NaN otherwise.
    fn lgamma(self) -> Self;

    fn from_count(n: usize) -> Self {
        Self::of(n as f64)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn of(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: Self, scale: Self) -> Self {
                match Gamma::new(shape, scale) {
                    Ok(g) => g.sample(rng),
                    Err(_) => <$t>::NAN,
                }
            }

            fn lgamma(self) -> Self {
                if self <= 0.0 || self.is_nan() {
                    return <$t>::NAN;
                }
                statrs::function::gamma::ln_gamma(self as f64) as $t
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(sum(exp(v)))`; `-inf` for an empty or all-`-inf` slice.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |m, v| if v > m { v } else { m });
    if max == T::neg_infinity() {
        return max;
    }
    if max == T::infinity() {
        return max;
    }
    let s: T = values.iter().map(|&v| (v - max).exp()).sum();
    max + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_extremes() {
        let v = [700.0_f64, 700.0];
        assert!((log_sum_exp(&v) - (700.0 + 2f64.ln())).abs() < 1e-12);
        let v = [-700.0_f64, -1e308, f64::NEG_INFINITY];
        assert!((log_sum_exp(&v) + 700.0).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_add_exp_matches_direct() {
        let a = 0.3_f64;
        let b = -1.2_f64;
        assert!((log_add_exp(a, b) - (a.exp() + b.exp()).ln()).abs() < 1e-14);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, b), b);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((5.0_f64.lgamma() - 24f64.ln()).abs() < 1e-12);
        assert!((0.5_f64.lgamma() - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((-1.0_f64).lgamma().is_nan());
        assert!((3.0_f32.lgamma() - 2f32.ln()).abs() < 1e-6);
    }
}

use crate::error::{Error, Result};
use crate::real::Real;

pub fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Unbiased sample variance.
pub fn variance<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::nan();
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::from_count(xs.len() - 1)
}

fn centered<T: Real>(series: &[T]) -> Result<(Vec<T>, T)> {
    let m = mean(series);
    let c: Vec<T> = series.iter().map(|&x| x - m).collect();
    let c0 = c.iter().map(|&v| v * v).sum::<T>() / T::from_count(series.len());
    if !(c0 > T::zero()) {
        return Err(Error::ConstantSeries);
    }
    Ok((c, c0))
}

#[inline]
fn autocov<T: Real>(c: &[T], lag: usize) -> T {
    let n = c.len();
    c[..n - lag]
        .iter()
        .zip(&c[lag..])
        .map(|(&a, &b)| a * b)
        .sum::<T>()
        / T::from_count(n)
}

/// Sample autocorrelation at lags `0..=max_lag` (divide-by-n estimator).
pub fn acf<T: Real>(series: &[T], max_lag: usize) -> Result<Vec<T>> {
    if series.len() <= max_lag {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            required: max_lag + 1,
        });
    }
    let (c, c0) = centered(series)?;
    Ok((0..=max_lag).map(|k| autocov(&c, k) / c0).collect())
}

/// Integrated autocorrelation time `1 + 2 Σ ρ_k`, truncated by Geyer's
/// initial positive sequence.
pub fn iact<T: Real>(series: &[T]) -> Result<T> {
    if series.len() < 4 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            required: 4,
        });
    }
    let (c, c0) = centered(series)?;
    let n = c.len();
    let rho = |k: usize| autocov(&c, k) / c0;
    // Γ_m = ρ_{2m} + ρ_{2m+1}; τ = -1 + 2 Σ_{m} Γ_m over the positive prefix.
    let mut tau = -T::one();
    let mut m = 0;
    while 2 * m + 1 < n {
        let gamma = rho(2 * m) + rho(2 * m + 1);
        if !(gamma > T::zero()) {
            break;
        }
        tau += T::of(2.0) * gamma;
        m += 1;
    }
    Ok(tau.max(T::one() / T::from_count(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RngStream;
    use crate::real::Real;

    fn white(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..n).map(|_| f64::standard_normal(&mut rng)).collect()
    }

    fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        let mut x = f64::standard_normal(&mut rng) / (1.0 - phi * phi).sqrt();
        (0..n)
            .map(|_| {
                x = phi * x + f64::standard_normal(&mut rng);
                x
            })
            .collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let s = [1.0, 3.0, 2.0, 5.0, 4.0];
        assert_eq!(acf(&s, 2).unwrap()[0], 1.0);
    }

    #[test]
    fn constant_series_errors() {
        assert_eq!(acf(&[2.0; 10], 3), Err(Error::ConstantSeries));
        assert_eq!(iact(&[2.0; 10]), Err(Error::ConstantSeries));
        assert!(matches!(
            acf(&[1.0, 2.0], 2),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn white_noise_band() {
        let s = white(100_000, 1);
        let r = acf(&s, 30).unwrap();
        assert!(r[1..].iter().all(|v| v.abs() < 0.02));
        let t = iact(&s).unwrap();
        assert!((t - 1.0).abs() < 0.1, "iact {t}");
    }

    #[test]
    fn ar1_closed_form() {
        let s = ar1(1_000_000, 0.9, 2);
        let r = acf(&s, 10).unwrap();
        for (k, v) in r.iter().enumerate() {
            assert!((v - 0.9f64.powi(k as i32)).abs() < 0.02, "lag {k}: {v}");
        }
        let t = iact(&s).unwrap();
        assert!((t / 19.0 - 1.0).abs() < 0.15, "iact {t}");
    }

    #[test]
    fn iact_time_reversal() {
        let s = ar1(5_000, 0.7, 3);
        let mut r = s.clone();
        r.reverse();
        let a = iact(&s).unwrap();
        let b = iact(&r).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }
}

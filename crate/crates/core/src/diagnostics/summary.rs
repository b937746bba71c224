use crate::error::{Error, Result};
use crate::real::Real;

/// Mean squared error over replicates and the standard deviation of the
/// squared errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseReport<T> {
    pub mse: T,
    pub sd: T,
    pub replicates: usize,
}

pub fn mse_report<T: Real>(estimates: &[T], truth: T) -> Result<MseReport<T>> {
    if estimates.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "MSE needs at least 2 replicates, got {}",
            estimates.len()
        )));
    }
    let sq: Vec<T> = estimates.iter().map(|&e| (e - truth) * (e - truth)).collect();
    let n = T::from_count(sq.len());
    let mse = sq.iter().copied().sum::<T>() / n;
    let var = sq.iter().map(|&s| (s - mse) * (s - mse)).sum::<T>() / (n - T::one());
    Ok(MseReport {
        mse,
        sd: var.sqrt(),
        replicates: sq.len(),
    })
}

/// `c_t = sqrt((1/t) Σ_{s≤t} (ĥ_s - h_s)²)`.
pub fn cumulative_rmse<T: Real>(estimate: &[T], truth: &[T]) -> Result<Vec<T>> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    let mut acc = T::zero();
    Ok(estimate
        .iter()
        .zip(truth)
        .enumerate()
        .map(|(i, (&e, &h))| {
            acc += (e - h) * (e - h);
            (acc / T::from_count(i + 1)).sqrt()
        })
        .collect())
}

/// Shortest interval spanning `⌈level·n⌉` order statistics.
pub fn hpd_interval<T: Real>(samples: &[T], level: T) -> Result<(T, T)> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::InvalidParameter(format!("HPD level must be in (0,1), got {level}")));
    }
    if samples.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "HPD needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("HPD samples contain NaN".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = s.len();
    let k = (level * T::from_count(n)).ceil().as_f64() as usize;
    let k = k.clamp(1, n);
    let mut best = 0;
    for i in 1..=(n - k) {
        if s[i + k - 1] - s[i] < s[best + k - 1] - s[best] {
            best = i;
        }
    }
    Ok((s[best], s[best + k - 1]))
}

/// Median (mean of the middle pair for even lengths).
pub fn median<T: Real>(values: &[T]) -> Option<T> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::of(2.0)
    })
}

/// One-sided sign test: `P(Bin(n, 1/2) >= wins)`.
pub fn sign_test_p(wins: usize, n: usize) -> f64 {
    if wins == 0 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in wins.min(n + 1)..=n {
        p += (statrs::function::factorial::ln_binomial(n as u64, k as u64) - n as f64 * std::f64::consts::LN_2).exp();
    }
    p
}

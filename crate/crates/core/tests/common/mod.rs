#![allow(dead_code)]

use imtm::targets::Target;
use imtm::Mixture64;

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    kolmogorov_q(d * (n * m / (n + m)).sqrt())
}

/// `P(K > t)` for the Kolmogorov distribution.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            let sign = if k as u64 % 2 == 1 { 2.0 } else { -2.0 };
            sign * (-2.0 * k * k * t * t).exp()
        })
        .sum();
    p.clamp(0.0, 1.0)
}

pub fn thin(xs: &[f64], every: usize) -> Vec<f64> {
    xs.iter().step_by(every).copied().collect()
}

pub fn mixture() -> Mixture64 {
    Mixture64::bimodal_2d()
}

pub fn mode_centers() -> Vec<Vec<f64>> {
    mixture().means().to_vec()
}

pub fn assert_finite<G: Target<f64>>(target: &G, x: &[f64]) {
    assert!(target.log_density(x).is_finite(), "log density at {x:?}");
}

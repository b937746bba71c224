use crate::error::{Error, Result};
use rand::Rng;

use crate::mathcore::RngStream;

/// Result of a two-means split.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSplit {
    pub centers: [Vec<f64>; 2],
    pub sizes: [usize; 2],
    pub labels: Vec<usize>,
    /// Distance between the centers over the pooled within-cluster standard
    /// deviation.
    pub separation: f64,
}

impl ClusterSplit {
    /// Two clusters, each holding at least `min_fraction` of the points and
    /// `separation` pooled standard deviations apart.
    pub fn is_separated(&self, min_separation: f64, min_fraction: f64) -> bool {
        let n = (self.sizes[0] + self.sizes[1]) as f64;
        self.separation >= min_separation
            && self.sizes.iter().all(|&s| s as f64 >= min_fraction * n)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k = 2, seeded by k-means++ and restarted `restarts`
/// times; keeps the split with the smallest within-cluster sum of squares.
pub fn two_means(points: &[Vec<f64>], restarts: usize, seed: u64) -> Result<ClusterSplit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "two-means needs at least 2 points, got {}",
            points.len()
        )));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::InvalidParameter("points have mixed dimensions".into()));
    }
    let mut rng = RngStream::new(seed, 0);
    let mut best: Option<(f64, Vec<usize>, [Vec<f64>; 2])> = None;
    for _ in 0..restarts.max(1) {
        let first = rng.random_range(0..points.len());
        let d2: Vec<f64> = points.iter().map(|p| dist2(p, &points[first])).collect();
        let total: f64 = d2.iter().sum();
        let second = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut k = 0;
            while k + 1 < points.len() && u >= d2[k] {
                u -= d2[k];
                k += 1;
            }
            k
        } else {
            (first + 1) % points.len()
        };
        let mut centers = [points[first].clone(), points[second].clone()];
        let mut labels = vec![0usize; points.len()];
        for _ in 0..100 {
            let mut changed = false;
            for (l, p) in labels.iter_mut().zip(points) {
                let nl = usize::from(dist2(p, &centers[1]) < dist2(p, &centers[0]));
                changed |= nl != *l;
                *l = nl;
            }
            for (c, center) in centers.iter_mut().enumerate() {
                let members: Vec<&Vec<f64>> =
                    points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
                if !members.is_empty() {
                    for k in 0..d {
                        center[k] = members.iter().map(|p| p[k]).sum::<f64>() / members.len() as f64;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let wss: f64 = points.iter().zip(&labels).map(|(p, &l)| dist2(p, &centers[l])).sum();
        if best.as_ref().is_none_or(|b| wss < b.0) {
            best = Some((wss, labels, centers));
        }
    }
    let (wss, labels, centers) = best.expect("at least one restart");
    let sizes = [
        labels.iter().filter(|&&l| l == 0).count(),
        labels.len() - labels.iter().filter(|&&l| l == 0).count(),
    ];
    let dof = (points.len().saturating_sub(2)).max(1) as f64 * d as f64;
    let pooled_sd = (wss / dof).sqrt();
    let gap = dist2(&centers[0], &centers[1]).sqrt();
    let separation = if pooled_sd > 0.0 {
        gap / pooled_sd
    } else if gap > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(ClusterSplit {
        centers,
        sizes,
        labels,
        separation,
    })
}

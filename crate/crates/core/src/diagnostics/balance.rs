use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::real::Real;

/// Verdict of a flow-symmetry test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceStatus {
    Pass,
    Fail,
    /// Too few transitions for the smallest flow to be resolved to 10%.
    Inconclusive,
}

/// Empirical flows `F̂(x, y) = P̂(X_0 = x, X_1 = y)` with `X_0` drawn from
/// the target.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowEstimate {
    pub states: usize,
    pub transitions: u64,
    /// Row-major `states × states`.
    pub flows: Vec<f64>,
    /// Standard error of each entry.
    pub standard_errors: Vec<f64>,
    /// Largest `|F̂(x,y) - F̂(y,x)|` in units of its standard error.
    pub worst_z: f64,
    pub worst_pair: (usize, usize),
    pub status: BalanceStatus,
}

impl FlowEstimate {
    pub fn flow(&self, x: usize, y: usize) -> f64 {
        self.flows[x * self.states + y]
    }
}

const CHUNKS: usize = 64;

fn sample_state<T: Real>(rng: &mut RngStream, cumulative: &[T]) -> usize {
    let u = T::open_unit(rng) * *cumulative.last().unwrap();
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
}

/// Simulates `transitions` independent one-step moves started from the
/// exact distribution `probabilities` and checks that every pair's flows
/// agree within three standard errors.
///
/// `step(rng, x)` returns the state after one transition from `x`. Work is
/// split over fixed per-chunk streams, so the result depends only on `seed`.
pub fn detailed_balance_test<T, F>(
    step: F,
    probabilities: &[T],
    transitions: u64,
    seed: u64,
) -> Result<FlowEstimate>
where
    T: Real,
    F: Fn(&mut RngStream, usize) -> Result<usize> + Sync,
{
    let k = probabilities.len();
    if k == 0 || k > 10 {
        return Err(Error::InvalidParameter(format!(
            "flow test needs 1..=10 states, got {k}"
        )));
    }
    if transitions == 0 {
        return Err(Error::InvalidParameter("need at least one transition".into()));
    }
    let mut acc = T::zero();
    let cumulative: Vec<T> = probabilities
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect();
    let per = transitions / CHUNKS as u64;
    let extra = transitions % CHUNKS as u64;
    let counts: Vec<Vec<u64>> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| -> Result<Vec<u64>> {
            let mut rng = RngStream::new(seed, c as u64);
            let mut counts = vec![0u64; k * k];
            let n = per + u64::from((c as u64) < extra);
            for _ in 0..n {
                let x = sample_state(&mut rng, &cumulative);
                let y = step(&mut rng, x)?;
                if y >= k {
                    return Err(Error::InvalidParameter(format!("step returned state {y}")));
                }
                counts[x * k + y] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0u64; k * k];
    for c in &counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    let n = transitions as f64;
    let flows: Vec<f64> = total.iter().map(|&c| c as f64 / n).collect();
    let standard_errors: Vec<f64> = flows.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();

    let mut worst_z = 0.0f64;
    let mut worst_pair = (0, 0);
    let mut smallest = f64::INFINITY;
    let mut smallest_se = 0.0;
    for x in 0..k {
        for y in 0..k {
            let p = flows[x * k + y];
            if x != y && p > 0.0 && p < smallest {
                smallest = p;
                smallest_se = standard_errors[x * k + y];
            }
            if y <= x {
                continue;
            }
            let (p1, p2) = (flows[x * k + y], flows[y * k + x]);
            let var = (p1 + p2 - (p1 - p2).powi(2)) / n;
            if var <= 0.0 {
                continue;
            }
            let z = (p1 - p2).abs() / var.sqrt();
            if z > worst_z {
                worst_z = z;
                worst_pair = (x, y);
            }
        }
    }
    let status = if worst_z > 3.0 {
        BalanceStatus::Fail
    } else if smallest.is_finite() && smallest_se >= 0.1 * smallest {
        BalanceStatus::Inconclusive
    } else {
        BalanceStatus::Pass
    };
    Ok(FlowEstimate {
        states: k,
        transitions,
        flows,
        standard_errors,
        worst_z,
        worst_pair,
        status,
    })
}

use rand::Rng;
use rayon::prelude::*;

use super::{mtm_transition, PopulationState, Step, TrialSlot};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{line_search_mode, ray_direction, Context, RayProposal};
use crate::real::Real;
use crate::targets::{gradient_or_fd, Target};
use crate::weights::{Counters, LambdaPolicy};

/// Settings for the multiple random-ray sampler.
#[derive(Clone, Debug)]
pub struct RayConfig<T> {
    /// Rays per chain.
    pub trials: usize,
    /// Variance of the signed step along each ray.
    pub variance: T,
    pub policy: LambdaPolicy,
    pub parallel: bool,
}

const ANCHOR_ATTEMPTS: usize = 10;

fn hold<T: Real>(x: &[T], counters: Counters) -> Step<T> {
    Step {
        position: x.to_vec(),
        accepted: false,
        selected: None,
        counters,
    }
}

fn ray_chain<T: Real, G: Target<T> + ?Sized>(
    rng: &mut RngStream,
    target: &G,
    cfg: &RayConfig<T>,
    snapshot: &[Vec<T>],
    previous: &[T],
    chain: usize,
) -> Result<Step<T>> {
    let x = &snapshot[chain];
    let n = snapshot.len();
    let mut counters = Counters::default();

    let mut u: Vec<T> = x.iter().zip(previous).map(|(&a, &b)| a - b).collect();
    if u.iter().all(|&v| v == T::zero()) {
        u = gradient_or_fd(target, x);
    }
    let mode = match line_search_mode(target, x, &u) {
        Ok(s) => s.point,
        Err(Error::DegenerateDirection) => {
            counters.degenerate_directions += 1;
            return Ok(hold(x, counters));
        }
        Err(e) => return Err(e),
    };

    let mut kernels = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let mut direction = None;
        for _ in 0..ANCHOR_ATTEMPTS {
            let k = rng.random_range(0..n - 1);
            let anchor = if k >= chain { k + 1 } else { k };
            match ray_direction(&mode, &snapshot[anchor]) {
                Ok(e) => {
                    direction = Some(e);
                    break;
                }
                Err(Error::DegenerateDirection) => counters.degenerate_directions += 1,
                Err(e) => return Err(e),
            }
        }
        match direction {
            Some(e) => kernels.push(RayProposal::new(e, cfg.variance)?),
            None => return Ok(hold(x, counters)),
        }
    }
    let slots: Vec<TrialSlot<'_, RayProposal<T>, T>> = kernels
        .iter()
        .map(|kernel| TrialSlot {
            kernel,
            anchor: None,
            nu: T::one(),
        })
        .collect();
    let ctx = Context::population(x, snapshot, chain);
    let mut step = mtm_transition(rng, target, &cfg.policy, &ctx, &slots)?;
    step.counters.merge(&counters);
    Ok(step)
}

/// One population sweep of the multiple random-ray sampler.
///
/// Each chain line-searches the target along its last move (or the gradient
/// after a rejection), points `M` rays from randomly chosen other chains
/// toward that mode, and runs a multiple-try update along them. Directions
/// are fixed for the whole step, so the reference trials lie on the same
/// rays through the selected point.
pub fn random_ray_step<T: Real, G: Target<T> + ?Sized>(
    pop: &mut PopulationState<T>,
    target: &G,
    cfg: &RayConfig<T>,
    rngs: &mut [RngStream],
) -> Result<Counters> {
    let n = pop.chains();
    if n <= cfg.trials || n < 2 {
        return Err(Error::InvalidConfig(vec![format!(
            "random-ray anchors require N > M (got N = {n}, M = {})",
            cfg.trials
        )]));
    }
    let snapshot = &pop.positions;
    let previous = &pop.previous;
    let run = |(i, rng): (usize, &mut RngStream)| {
        ray_chain(rng, target, cfg, snapshot, &previous[i], i)
    };
    let steps: Vec<Step<T>> = if cfg.parallel {
        rngs.par_iter_mut().enumerate().map(run).collect::<Result<_>>()?
    } else {
        rngs.iter_mut().enumerate().map(run).collect::<Result<_>>()?
    };
    Ok(pop.record(steps))
}

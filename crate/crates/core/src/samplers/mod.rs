//! Sampler step functions, population orchestration and the annealed
//! estimator.

mod annealed;
mod config;
mod gibbs;
mod population;
mod ray;
mod single;

pub use annealed::{aimtm1_step, aimtm2_step, anneal_estimate, AnnealEstimate, TemperatureLadder};
pub use config::{run, Algorithm, Initialization, RunOutput, SamplerConfig};
pub use gibbs::{
    imtm_within_gibbs_step, mh_within_gibbs_step, GibbsConfig, MhGibbsConfig, SvPopulation,
};
pub use population::{gimtm_step, imtm_step, AnchorStrategy, PopulationConfig, PopulationState};
pub use ray::{random_ray_step, RayConfig};
pub use single::{mh_step, mtm_dp_step, mtm_step};

use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{Context, Proposal};
use crate::real::Real;
use crate::targets::Target;
use crate::weights::{acceptance_ratio, select_trial, trial_weight, Counters, LambdaPolicy, TrialSet};

/// One trial slot: its kernel, the chain it is anchored to (if any) and the
/// slot's `ν` factor.
#[derive(Debug)]
pub struct TrialSlot<'a, K: ?Sized, T> {
    pub kernel: &'a K,
    pub anchor: Option<usize>,
    pub nu: T,
}

impl<K: ?Sized, T: Copy> Clone for TrialSlot<'_, K, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<K: ?Sized, T: Copy> Copy for TrialSlot<'_, K, T> {}

/// Outcome of one chain update.
#[derive(Clone, Debug, PartialEq)]
pub struct Step<T> {
    pub position: Vec<T>,
    pub accepted: bool,
    /// 0-based selected slot; `None` when every trial had zero weight.
    pub selected: Option<usize>,
    pub counters: Counters,
}

impl<T: Real> Step<T> {
    fn hold(x: &[T], counters: Counters) -> Self {
        Self {
            position: x.to_vec(),
            accepted: false,
            selected: None,
            counters,
        }
    }
}

/// One multiple-try transition from `base.current` with per-slot kernels.
///
/// Forward trials come from each slot's kernel under `base` (with the slot's
/// anchor); the reference set is drawn from the same kernels with the chain
/// slot replaced by the selected point, and `x*_J` is the current point.
pub fn mtm_transition<T, G, K>(
    rng: &mut RngStream,
    target: &G,
    policy: &LambdaPolicy,
    base: &Context<'_, T>,
    slots: &[TrialSlot<'_, K, T>],
) -> Result<Step<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T> + ?Sized,
{
    mtm_transition_with_trials(rng, target, policy, base, slots).map(|(s, _)| s)
}

/// [`mtm_transition`] that also returns the full trial set.
pub fn mtm_transition_with_trials<T, G, K>(
    rng: &mut RngStream,
    target: &G,
    policy: &LambdaPolicy,
    base: &Context<'_, T>,
    slots: &[TrialSlot<'_, K, T>],
) -> Result<(Step<T>, TrialSet<T>)>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T> + ?Sized,
{
    if slots.is_empty() {
        return Err(Error::InvalidParameter("at least one trial slot is required".into()));
    }
    let x = base.current;
    let mut counters = Counters::default();
    let m = slots.len();
    let mut trials = Vec::with_capacity(m);
    let mut forward = Vec::with_capacity(m);
    for s in slots {
        let ctx = base.with_anchor(s.anchor);
        let y = s.kernel.sample(rng, &ctx);
        let w = trial_weight(target, s.kernel, policy, &y, &ctx, s.nu)?;
        counters.degenerate_weights += u64::from(w.degenerate);
        forward.push(w.log);
        trials.push(y);
    }

    let selected = match select_trial(rng, &forward) {
        Ok(j) => j,
        Err(Error::StuckTrials) => {
            counters.stuck += 1;
            let set = TrialSet {
                trials,
                forward,
                selected: None,
                references: Vec::new(),
                reference: Vec::new(),
            };
            return Ok((Step::hold(x, counters), set));
        }
        Err(e) => return Err(e),
    };
    let y = trials[selected].clone();

    let at_y = base.with_current(&y);
    let mut references = Vec::with_capacity(m);
    let mut reference = Vec::with_capacity(m);
    for (j, s) in slots.iter().enumerate() {
        let ctx = at_y.with_anchor(s.anchor);
        let xs = if j == selected {
            x.to_vec()
        } else {
            s.kernel.sample(rng, &ctx)
        };
        let w = trial_weight(target, s.kernel, policy, &xs, &ctx, s.nu)?;
        counters.degenerate_weights += u64::from(w.degenerate);
        reference.push(w.log);
        references.push(xs);
    }

    let acc = acceptance_ratio(&forward, &reference);
    counters.degenerate_ratios += u64::from(acc.degenerate);
    let accepted = acc.rho >= T::one() || T::open_unit(rng) < acc.rho;
    let step = Step {
        position: if accepted { y } else { x.to_vec() },
        accepted,
        selected: Some(selected),
        counters,
    };
    let set = TrialSet {
        trials,
        forward,
        selected: Some(selected),
        references,
        reference,
    };
    Ok((step, set))
}

/// Independent overdispersed starting points `N(center, scale²·I)`,
/// redrawn until they land in the target's support.
pub fn overdispersed_start<T: Real, G: Target<T> + ?Sized>(
    rng: &mut RngStream,
    target: &G,
    center: &[T],
    scale: T,
    chains: usize,
) -> Result<Vec<Vec<T>>> {
    (0..chains)
        .map(|_| {
            for _ in 0..10_000 {
                let x: Vec<T> = center
                    .iter()
                    .map(|&c| c + scale * T::standard_normal(rng))
                    .collect();
                if target.in_support(&x) && target.log_density(&x).is_finite() {
                    return Ok(x);
                }
            }
            Err(Error::InvalidParameter(
                "could not draw a starting point inside the target support".into(),
            ))
        })
        .collect()
}

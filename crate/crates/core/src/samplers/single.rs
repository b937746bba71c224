use super::{mtm_transition, Step, TrialSlot};
use crate::error::Result;
use crate::mathcore::RngStream;
use crate::proposals::{Context, Proposal};
use crate::real::Real;
use crate::targets::Target;
use crate::weights::{Counters, LambdaPolicy};

/// Metropolis-Hastings with ratio `π(y)T(x|y) / π(x)T(y|x)`.
pub fn mh_step<T, G, K>(rng: &mut RngStream, x: &[T], target: &G, kernel: &K) -> Result<Step<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T> + ?Sized,
{
    let ctx = Context::single(x);
    let y = kernel.sample(rng, &ctx);
    let accepted = if target.in_support(&y) {
        let fwd = kernel.log_density(&y, &ctx)?;
        let back = kernel.log_density(x, &Context::single(&y))?;
        let log_ratio = target.log_density(&y) + back - target.log_density(x) - fwd;
        !log_ratio.is_nan() && (log_ratio >= T::zero() || T::open_unit(rng).ln() < log_ratio)
    } else {
        false
    };
    Ok(Step {
        position: if accepted { y } else { x.to_vec() },
        accepted,
        selected: Some(0),
        counters: Counters::default(),
    })
}

/// Classic multiple-try step: `m` trials from one shared kernel.
pub fn mtm_step<T, G, K>(
    rng: &mut RngStream,
    x: &[T],
    target: &G,
    kernel: &K,
    m: usize,
    policy: &LambdaPolicy,
) -> Result<Step<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T> + ?Sized,
{
    let slots: Vec<TrialSlot<'_, K, T>> = (0..m)
        .map(|_| TrialSlot {
            kernel,
            anchor: None,
            nu: T::one(),
        })
        .collect();
    mtm_transition(rng, target, policy, &Context::single(x), &slots)
}

/// Multiple-try step with one trial per kernel.
pub fn mtm_dp_step<T, G, K>(
    rng: &mut RngStream,
    x: &[T],
    target: &G,
    kernels: &[K],
    policy: &LambdaPolicy,
) -> Result<Step<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T>,
{
    let slots: Vec<TrialSlot<'_, K, T>> = kernels
        .iter()
        .map(|kernel| TrialSlot {
            kernel,
            anchor: None,
            nu: T::one(),
        })
        .collect();
    mtm_transition(rng, target, policy, &Context::single(x), &slots)
}

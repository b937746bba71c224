use rayon::prelude::*;

use super::population::plan_slots;
use super::{mh_step, mtm_transition, AnchorStrategy, Step, TrialSlot};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{AnchoredRw, Context, GaussianRw};
use crate::real::Real;
use crate::targets::{SvModel, SvState, Target};
use crate::weights::{Counters, LambdaPolicy};

/// Population of Gibbs chains for the stochastic volatility model.
#[derive(Clone, Debug, PartialEq)]
pub struct SvPopulation<T> {
    pub states: Vec<SvState<T>>,
    pub iteration: u64,
}

impl<T: Real> SvPopulation<T> {
    pub fn new(states: Vec<SvState<T>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("need at least one chain".into()));
        }
        Ok(Self {
            states,
            iteration: 0,
        })
    }

    pub fn chains(&self) -> usize {
        self.states.len()
    }
}

/// Multiple-try within Gibbs: the φ and `h_t` updates each use `M`
/// Gaussian kernels centred at randomly chosen other chains' values.
#[derive(Clone, Debug)]
pub struct GibbsConfig<T> {
    /// Standard deviations of the φ kernels, one per slot.
    pub phi_scales: Vec<T>,
    /// Standard deviations of the `h_t` kernels, one per slot.
    pub latent_scales: Vec<T>,
    pub policy: LambdaPolicy,
    pub parallel: bool,
}

impl<T: Real> GibbsConfig<T> {
    /// Five slots per block with importance weights.
    pub fn standard() -> Self {
        Self {
            phi_scales: [0.01, 0.02, 0.05, 0.1, 0.2].iter().map(|&v| T::of(v)).collect(),
            latent_scales: [0.1, 0.2, 0.4, 0.8, 1.6].iter().map(|&v| T::of(v)).collect(),
            policy: LambdaPolicy::importance(),
            parallel: true,
        }
    }

    fn kernels(scales: &[T]) -> Vec<AnchoredRw<T>> {
        scales.iter().map(|&s| AnchoredRw::isotropic(1, s * s)).collect()
    }
}

fn slice_update<T: Real, G: Target<T> + ?Sized>(
    rng: &mut RngStream,
    target: &G,
    kernels: &[AnchoredRw<T>],
    policy: &LambdaPolicy,
    snapshot: &[Vec<T>],
    chain: usize,
    current: T,
) -> Result<Step<T>> {
    let plan = plan_slots::<T>(
        rng,
        AnchorStrategy::UniformOthers,
        chain,
        snapshot.len(),
        kernels.len(),
        kernels.len(),
        &[],
    );
    let slots: Vec<TrialSlot<'_, AnchoredRw<T>, T>> = plan
        .iter()
        .map(|&(k, anchor)| TrialSlot {
            kernel: &kernels[k],
            anchor,
            nu: T::one(),
        })
        .collect();
    let x = [current];
    let ctx = Context::population(&x[..], snapshot, chain);
    mtm_transition(rng, target, policy, &ctx, &slots)
}

struct Frozen<T> {
    phi: Vec<Vec<T>>,
    /// `latent[t][k]` is chain `k`'s `h_t`.
    latent: Vec<Vec<Vec<T>>>,
}

fn freeze<T: Real>(states: &[SvState<T>]) -> Frozen<T> {
    let len = states[0].h.len();
    Frozen {
        phi: states.iter().map(|s| vec![s.phi]).collect(),
        latent: (0..len)
            .map(|t| states.iter().map(|s| vec![s.h[t]]).collect())
            .collect(),
    }
}

fn gibbs_chain<T: Real>(
    rng: &mut RngStream,
    model: &SvModel<T>,
    cfg: &GibbsConfig<T>,
    phi_kernels: &[AnchoredRw<T>],
    latent_kernels: &[AnchoredRw<T>],
    frozen: &Frozen<T>,
    chain: usize,
    state: &mut SvState<T>,
) -> Result<(Counters, u64, u64)> {
    let mut counters = Counters::default();
    let mut accepted = 0u64;
    let mut moves = 0u64;
    match model.draw_scales(state, rng) {
        Ok(()) => {}
        Err(Error::Overflow(_)) => counters.overflows += 1,
        Err(e) => return Err(e),
    }
    let step = slice_update(
        rng,
        &model.phi_slice(state),
        phi_kernels,
        &cfg.policy,
        &frozen.phi,
        chain,
        state.phi,
    )?;
    counters.merge(&step.counters);
    accepted += u64::from(step.accepted);
    moves += 1;
    state.phi = step.position[0];
    for t in 0..state.h.len() {
        let step = slice_update(
            rng,
            &model.latent_slice(state, t),
            latent_kernels,
            &cfg.policy,
            &frozen.latent[t],
            chain,
            state.h[t],
        )?;
        counters.merge(&step.counters);
        accepted += u64::from(step.accepted);
        moves += 1;
        state.h[t] = step.position[0];
    }
    Ok((counters, accepted, moves))
}

/// One sweep of multiple-try-within-Gibbs over every chain.
///
/// Each chain draws β² and σ² from their inverse-gamma conditionals, then
/// updates φ and each `h_t` in turn by a multiple-try step on the 1-d
/// conditional whose kernels are centred at other chains' start-of-sweep
/// values. Returns counters and the multiple-try acceptance rate.
pub fn imtm_within_gibbs_step<T: Real>(
    model: &SvModel<T>,
    pop: &mut SvPopulation<T>,
    cfg: &GibbsConfig<T>,
    rngs: &mut [RngStream],
) -> Result<(Counters, f64)> {
    if pop.chains() < 2 || pop.chains() <= cfg.phi_scales.len().max(cfg.latent_scales.len()) {
        return Err(Error::InvalidConfig(vec![format!(
            "random anchor selection requires N > M (got N = {}, M = {})",
            pop.chains(),
            cfg.phi_scales.len().max(cfg.latent_scales.len())
        )]));
    }
    let frozen = freeze(&pop.states);
    let phi_kernels = GibbsConfig::kernels(&cfg.phi_scales);
    let latent_kernels = GibbsConfig::kernels(&cfg.latent_scales);
    let run = |(i, (rng, state)): (usize, (&mut RngStream, &mut SvState<T>))| {
        gibbs_chain(rng, model, cfg, &phi_kernels, &latent_kernels, &frozen, i, state)
    };
    let results: Vec<(Counters, u64, u64)> = if cfg.parallel {
        rngs.par_iter_mut()
            .zip(pop.states.par_iter_mut())
            .enumerate()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        rngs.iter_mut()
            .zip(pop.states.iter_mut())
            .enumerate()
            .map(run)
            .collect::<Result<_>>()?
    };
    pop.iteration += 1;
    let mut counters = Counters::default();
    let (mut acc, mut moves) = (0u64, 0u64);
    for (c, a, m) in &results {
        counters.merge(c);
        acc += a;
        moves += m;
    }
    Ok((counters, acc as f64 / moves.max(1) as f64))
}

/// Random-walk Metropolis-within-Gibbs baseline.
#[derive(Clone, Copy, Debug)]
pub struct MhGibbsConfig<T> {
    pub phi_step: T,
    pub latent_step: T,
}

impl<T: Real> MhGibbsConfig<T> {
    pub fn standard() -> Self {
        Self {
            phi_step: T::of(0.05),
            latent_step: T::of(0.5),
        }
    }
}

/// One single-chain sweep: inverse-gamma draws for β², σ², then random-walk
/// MH on φ and each `h_t`. Returns counters and the MH acceptance rate.
pub fn mh_within_gibbs_step<T: Real>(
    model: &SvModel<T>,
    state: &mut SvState<T>,
    cfg: &MhGibbsConfig<T>,
    rng: &mut RngStream,
) -> Result<(Counters, f64)> {
    let mut counters = Counters::default();
    match model.draw_scales(state, rng) {
        Ok(()) => {}
        Err(Error::Overflow(_)) => counters.overflows += 1,
        Err(e) => return Err(e),
    }
    let phi_kernel = GaussianRw::isotropic(1, cfg.phi_step * cfg.phi_step);
    let latent_kernel = GaussianRw::isotropic(1, cfg.latent_step * cfg.latent_step);
    let mut accepted = 0usize;
    let step = mh_step(rng, &[state.phi], &model.phi_slice(state), &phi_kernel)?;
    accepted += usize::from(step.accepted);
    state.phi = step.position[0];
    for t in 0..state.h.len() {
        let step = mh_step(rng, &[state.h[t]], &model.latent_slice(state, t), &latent_kernel)?;
        accepted += usize::from(step.accepted);
        state.h[t] = step.position[0];
    }
    Ok((counters, accepted as f64 / (state.h.len() + 1) as f64))
}

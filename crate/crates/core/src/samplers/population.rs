use rand::Rng;
use rayon::prelude::*;

use super::{mtm_transition, Step, TrialSlot};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{Context, Kernel};
use crate::real::Real;
use crate::targets::Target;
use crate::weights::{Counters, LambdaPolicy, NuTracker};

/// Positions of all chains plus what the next iteration needs to know
/// about the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationState<T> {
    pub positions: Vec<Vec<T>>,
    pub previous: Vec<Vec<T>>,
    pub selected: Vec<Option<usize>>,
    pub accepted: Vec<bool>,
    pub iteration: u64,
}

impl<T: Real> PopulationState<T> {
    pub fn new(positions: Vec<Vec<T>>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidParameter("population needs at least one chain".into()));
        }
        let d = positions[0].len();
        if let Some(p) = positions.iter().find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        let n = positions.len();
        Ok(Self {
            previous: positions.clone(),
            positions,
            selected: vec![None; n],
            accepted: vec![false; n],
            iteration: 0,
        })
    }

    pub fn chains(&self) -> usize {
        self.positions.len()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub(crate) fn record(&mut self, steps: Vec<Step<T>>) -> Counters {
        let mut counters = Counters::default();
        for (i, s) in steps.into_iter().enumerate() {
            counters.merge(&s.counters);
            let old = std::mem::replace(&mut self.positions[i], s.position);
            self.previous[i] = old;
            self.selected[i] = s.selected;
            self.accepted[i] = s.accepted;
        }
        self.iteration += 1;
        counters
    }
}

/// How trial slots are attached to kernels and anchor chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorStrategy {
    /// Slot `j` uses kernel `j` with no anchor.
    Fixed,
    /// Slot `j` is anchored at chain `j`.
    SlotToChain,
    /// Anchors drawn uniformly from all chains.
    Uniform,
    /// Anchors drawn uniformly from the other chains.
    UniformOthers,
    /// Each slot draws its kernel with probability `∝ (ν + 1/M)/2` and a
    /// uniform anchor.
    NuProportional,
    /// Every slot anchored at the updating chain itself.
    SelfAnchored,
    /// Chain `i` (1-based) draws anchors uniformly from chains `1..=N-i+1`.
    Ladder,
}

impl AnchorStrategy {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "fixed" => Self::Fixed,
            "slot" => Self::SlotToChain,
            "uniform" => Self::Uniform,
            "others" => Self::UniformOthers,
            "nu" => Self::NuProportional,
            "self" => Self::SelfAnchored,
            "ladder" => Self::Ladder,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::SlotToChain => "slot",
            Self::Uniform => "uniform",
            Self::UniformOthers => "others",
            Self::NuProportional => "nu",
            Self::SelfAnchored => "self",
            Self::Ladder => "ladder",
        }
    }

    /// Whether slots borrow other chains' positions, which needs `N > M`.
    pub fn draws_random_anchors(&self) -> bool {
        matches!(self, Self::Uniform | Self::UniformOthers | Self::NuProportional)
    }
}

/// Kernels and interaction pattern for population samplers.
#[derive(Clone, Debug)]
pub struct PopulationConfig<T> {
    pub kernels: Vec<Kernel<T>>,
    /// Trials per chain `M_i`; chain `i` uses the first `M_i` kernels.
    /// Empty means every chain uses all kernels.
    pub trials: Vec<usize>,
    pub anchors: AnchorStrategy,
    pub policy: LambdaPolicy,
    pub parallel: bool,
}

impl<T: Real> PopulationConfig<T> {
    pub fn new(kernels: Vec<Kernel<T>>, anchors: AnchorStrategy, policy: LambdaPolicy) -> Self {
        Self {
            kernels,
            trials: Vec::new(),
            anchors,
            policy,
            parallel: true,
        }
    }

    pub fn trials_for(&self, chain: usize) -> usize {
        self.trials.get(chain).copied().unwrap_or(self.kernels.len())
    }

    /// Structural checks against a population of `chains`.
    pub fn violations(&self, chains: usize) -> Vec<String> {
        let mut v = Vec::new();
        if self.kernels.is_empty() {
            v.push("at least one proposal kernel is required".to_string());
        }
        if !self.trials.is_empty() && self.trials.len() != chains {
            v.push(format!(
                "per-chain trial counts list {} entries for {} chains",
                self.trials.len(),
                chains
            ));
        }
        for (i, &m) in self.trials.iter().enumerate() {
            if m == 0 || m > self.kernels.len() {
                v.push(format!(
                    "chain {} trial count {} must be in 1..={}",
                    i + 1,
                    m,
                    self.kernels.len()
                ));
            }
        }
        let m = (0..chains).map(|i| self.trials_for(i)).max().unwrap_or(0);
        if self.anchors.draws_random_anchors() && chains <= m {
            v.push(format!(
                "random anchor selection requires N > M (got N = {chains}, M = {m})"
            ));
        }
        if self.anchors == AnchorStrategy::SlotToChain && m > chains {
            v.push(format!(
                "slot-to-chain anchoring needs M <= N (got N = {chains}, M = {m})"
            ));
        }
        if self.anchors == AnchorStrategy::UniformOthers && chains < 2 {
            v.push("anchoring at other chains needs N >= 2".to_string());
        }
        v
    }
}

/// `(kernel index, anchor)` for each trial of chain `i`, chosen before and
/// independently of the chain's current point.
pub(crate) fn plan_slots<T: Real>(
    rng: &mut RngStream,
    strategy: AnchorStrategy,
    chain: usize,
    chains: usize,
    m: usize,
    kernels: usize,
    nu: &[T],
) -> Vec<(usize, Option<usize>)> {
    match strategy {
        AnchorStrategy::Fixed => (0..m).map(|j| (j, None)).collect(),
        AnchorStrategy::SlotToChain => (0..m).map(|j| (j, Some(j))).collect(),
        AnchorStrategy::Uniform => (0..m).map(|j| (j, Some(rng.random_range(0..chains)))).collect(),
        AnchorStrategy::UniformOthers => (0..m)
            .map(|j| {
                let k = rng.random_range(0..chains - 1);
                (j, Some(if k >= chain { k + 1 } else { k }))
            })
            .collect(),
        AnchorStrategy::SelfAnchored => (0..m).map(|j| (j, Some(chain))).collect(),
        AnchorStrategy::Ladder => (0..m)
            .map(|j| (j, Some(rng.random_range(0..chains - chain))))
            .collect(),
        AnchorStrategy::NuProportional => {
            let uniform = T::one() / T::from_count(kernels);
            let probs: Vec<T> = (0..kernels)
                .map(|j| (nu.get(j).copied().unwrap_or(uniform) + uniform) / T::of(2.0))
                .collect();
            let total: T = probs.iter().copied().sum();
            (0..m)
                .map(|_| {
                    let u = T::open_unit(rng) * total;
                    let mut acc = T::zero();
                    let mut pick = kernels - 1;
                    for (j, &p) in probs.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            pick = j;
                            break;
                        }
                    }
                    (pick, Some(rng.random_range(0..chains)))
                })
                .collect()
        }
    }
}

/// Updates chain `i` against `snapshot` (whose slot `i` is its current point).
pub(crate) fn update_chain<T: Real, G: Target<T> + ?Sized>(
    rng: &mut RngStream,
    target: &G,
    cfg: &PopulationConfig<T>,
    snapshot: &[Vec<T>],
    chain: usize,
    nu: &[T],
) -> Result<Step<T>> {
    let m = cfg.trials_for(chain);
    let plan = plan_slots(rng, cfg.anchors, chain, snapshot.len(), m, cfg.kernels.len(), nu);
    let slots: Vec<TrialSlot<'_, Kernel<T>, T>> = plan
        .iter()
        .map(|&(k, anchor)| TrialSlot {
            kernel: &cfg.kernels[k],
            anchor,
            nu: nu.get(k).copied().unwrap_or(T::one()),
        })
        .collect();
    let base = Context::population(&snapshot[chain], snapshot, chain);
    let mut step = mtm_transition(rng, target, &cfg.policy, &base, &slots)?;
    // Report the kernel used, which is what ν counts.
    step.selected = step.selected.map(|j| plan[j].0);
    Ok(step)
}

/// Simultaneous population update: every chain conditions on the frozen
/// start-of-iteration positions.
pub fn imtm_step<T: Real, G: Target<T> + ?Sized>(
    pop: &mut PopulationState<T>,
    target: &G,
    cfg: &PopulationConfig<T>,
    rngs: &mut [RngStream],
    nu: &mut NuTracker<T>,
) -> Result<Counters> {
    imtm_step_with(pop, |_| target, cfg, rngs, nu)
}

/// [`imtm_step`] with a per-chain target.
pub(crate) fn imtm_step_with<'t, T, G, F>(
    pop: &mut PopulationState<T>,
    target_of: F,
    cfg: &PopulationConfig<T>,
    rngs: &mut [RngStream],
    nu: &mut NuTracker<T>,
) -> Result<Counters>
where
    T: Real,
    G: Target<T> + ?Sized + 't,
    F: Fn(usize) -> &'t G + Sync,
{
    let snapshot = &pop.positions;
    let weights = nu.nu().to_vec();
    let run = |(i, rng): (usize, &mut RngStream)| {
        update_chain(rng, target_of(i), cfg, snapshot, i, &weights)
    };
    let steps: Vec<Step<T>> = if cfg.parallel {
        rngs.par_iter_mut().enumerate().map(run).collect::<Result<_>>()?
    } else {
        rngs.iter_mut().enumerate().map(run).collect::<Result<_>>()?
    };
    let counters = pop.record(steps);
    nu.update(&pop.selected);
    Ok(counters)
}

/// Sequential population update: chain `i` sees chains `< i` already moved.
pub fn gimtm_step<T: Real, G: Target<T> + ?Sized>(
    pop: &mut PopulationState<T>,
    target: &G,
    cfg: &PopulationConfig<T>,
    rngs: &mut [RngStream],
    nu: &mut NuTracker<T>,
) -> Result<Counters> {
    let weights = nu.nu().to_vec();
    let mut live = pop.positions.clone();
    let mut steps = Vec::with_capacity(live.len());
    for (i, rng) in rngs.iter_mut().enumerate() {
        let step = update_chain(rng, target, cfg, &live, i, &weights)?;
        live[i].clone_from(&step.position);
        steps.push(step);
    }
    let counters = pop.record(steps);
    nu.update(&pop.selected);
    Ok(counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposals::AnchoredRw;
    use crate::targets::Gaussian;

    #[test]
    fn slot_plans_respect_strategy() {
        let mut rng = RngStream::new(1, 0);
        let nu = [0.25f64; 4];
        for _ in 0..200 {
            let p = plan_slots(&mut rng, AnchorStrategy::UniformOthers, 2, 5, 4, 4, &nu);
            assert!(p.iter().all(|&(_, a)| a != Some(2) && a.unwrap() < 5));
            let p = plan_slots(&mut rng, AnchorStrategy::SelfAnchored, 3, 5, 4, 4, &nu);
            assert!(p.iter().all(|&(_, a)| a == Some(3)));
        }
        let nu = [1.0f64, 0.0];
        let mut zeros = 0;
        for _ in 0..10_000 {
            let p = plan_slots(&mut rng, AnchorStrategy::NuProportional, 0, 5, 1, 2, &nu);
            zeros += usize::from(p[0].0 == 0);
        }
        assert!((zeros as f64 / 10_000.0 - 0.75).abs() < 0.02);
    }

    #[test]
    fn validation_names_population_constraint() {
        let k: Vec<Kernel<f64>> = vec![AnchoredRw::isotropic(2, 1.0).into(); 3];
        let cfg = PopulationConfig::new(k, AnchorStrategy::Uniform, LambdaPolicy::importance());
        let v = cfg.violations(3);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("N > M"));
        assert!(cfg.violations(4).is_empty());
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let t = Gaussian::<f64>::standard(2);
        let k: Vec<Kernel<f64>> = (1..=3).map(|j| AnchoredRw::isotropic(2, j as f64).into()).collect();
        let mut cfg = PopulationConfig::new(k, AnchorStrategy::Uniform, LambdaPolicy::importance());
        let start: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, -(i as f64)]).collect();
        let mut out = Vec::new();
        for parallel in [true, false] {
            cfg.parallel = parallel;
            let mut pop = PopulationState::new(start.clone()).unwrap();
            let mut rngs = RngStream::family(7, 0, 6);
            let mut nu = NuTracker::new(3, 6);
            for _ in 0..50 {
                imtm_step(&mut pop, &t, &cfg, &mut rngs, &mut nu).unwrap();
            }
            out.push(pop);
        }
        assert_eq!(out[0], out[1]);
    }

    #[test]
    fn rejected_steps_hold_previous_position() {
        let t = Gaussian::<f64>::standard(1);
        let k: Vec<Kernel<f64>> = vec![AnchoredRw::isotropic(1, 100.0).into(); 2];
        let cfg = PopulationConfig::new(k, AnchorStrategy::Uniform, LambdaPolicy::importance());
        let mut pop = PopulationState::new((0..4).map(|i| vec![0.1 * i as f64]).collect()).unwrap();
        let mut rngs = RngStream::family(9, 0, 4);
        let mut nu = NuTracker::new(2, 4);
        for _ in 0..100 {
            let before = pop.positions.clone();
            imtm_step(&mut pop, &t, &cfg, &mut rngs, &mut nu).unwrap();
            for i in 0..4 {
                if !pop.accepted[i] {
                    assert_eq!(pop.positions[i][0].to_bits(), before[i][0].to_bits());
                }
            }
        }
    }
}

use std::fmt;
use std::str::FromStr;

use super::{
    aimtm1_step, aimtm2_step, gimtm_step, imtm_step, mh_step, mtm_dp_step, mtm_step,
    overdispersed_start, random_ray_step, AnchorStrategy, PopulationConfig, PopulationState,
    RayConfig, Step, TemperatureLadder,
};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::Kernel;
use crate::real::Real;
use crate::targets::Target;
use crate::trace::ChainTrace;
use crate::weights::{Counters, LambdaPolicy, NuTracker};

/// Which sampler [`run`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Mh,
    Mtm,
    MtmDp,
    Imtm,
    Gimtm,
    Aimtm1,
    Aimtm2,
    RandomRay,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Mh,
        Algorithm::Mtm,
        Algorithm::MtmDp,
        Algorithm::Imtm,
        Algorithm::Gimtm,
        Algorithm::Aimtm1,
        Algorithm::Aimtm2,
        Algorithm::RandomRay,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Mh => "mh",
            Algorithm::Mtm => "mtm",
            Algorithm::MtmDp => "mtm-dp",
            Algorithm::Imtm => "imtm",
            Algorithm::Gimtm => "gimtm",
            Algorithm::Aimtm1 => "aimtm1",
            Algorithm::Aimtm2 => "aimtm2",
            Algorithm::RandomRay => "random-ray",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(Algorithm::name).collect();
                Error::Configuration(format!(
                    "unknown algorithm `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Starting points for the chains.
#[derive(Clone, Debug, PartialEq)]
pub enum Initialization<T> {
    Explicit(Vec<Vec<T>>),
    /// `N(center, scale²·I)`; `None` means ten times the largest proposal
    /// standard deviation.
    Overdispersed { center: Vec<T>, scale: Option<T> },
}

/// Everything [`run`] needs besides the target.
#[derive(Clone, Debug)]
pub struct SamplerConfig<T> {
    pub algorithm: Algorithm,
    pub chains: usize,
    /// Trials per step for `mtm` (copies of the first kernel) and rays per
    /// chain for `random-ray`.
    pub trials: usize,
    /// Optional per-chain trial counts for population samplers.
    pub per_chain_trials: Vec<usize>,
    pub kernels: Vec<Kernel<T>>,
    /// Metropolis kernels of the auxiliary chains (`aimtm2`).
    pub aux_kernels: Vec<Kernel<T>>,
    pub anchors: AnchorStrategy,
    pub policy: LambdaPolicy,
    pub ladder: Option<TemperatureLadder<T>>,
    pub ray_variance: T,
    pub iterations: usize,
    pub seed: u64,
    pub init: Initialization<T>,
    pub parallel: bool,
}

impl<T: Real> SamplerConfig<T> {
    pub fn new(algorithm: Algorithm, kernels: Vec<Kernel<T>>, init: Initialization<T>) -> Self {
        Self {
            algorithm,
            chains: 1,
            trials: 1,
            per_chain_trials: Vec::new(),
            kernels,
            aux_kernels: Vec::new(),
            anchors: AnchorStrategy::Fixed,
            policy: LambdaPolicy::importance(),
            ladder: None,
            ray_variance: T::one(),
            iterations: 1000,
            seed: 0,
            init,
            parallel: true,
        }
    }

    fn population(&self) -> PopulationConfig<T> {
        PopulationConfig {
            kernels: self.kernels.clone(),
            trials: self.per_chain_trials.clone(),
            anchors: self.anchors,
            policy: self.policy,
            parallel: self.parallel,
        }
    }

    /// Every violated constraint, checked against a target of dimension
    /// `dim`.
    pub fn violations(&self, dim: usize) -> Vec<String> {
        let mut v = Vec::new();
        if self.chains == 0 {
            v.push("N (chains) must be at least 1".to_string());
        }
        if self.kernels.is_empty() && self.algorithm != Algorithm::RandomRay {
            v.push("at least one proposal kernel is required".to_string());
        }
        if self.trials == 0 {
            v.push("M (trials) must be at least 1".to_string());
        }
        match &self.init {
            Initialization::Explicit(p) => {
                if p.len() != self.chains {
                    v.push(format!(
                        "{} starting points given for {} chains",
                        p.len(),
                        self.chains
                    ));
                }
                if p.iter().any(|x| x.len() != dim) {
                    v.push(format!("starting points must have dimension {dim}"));
                }
            }
            Initialization::Overdispersed { center, scale } => {
                if center.len() != dim {
                    v.push(format!(
                        "initial center has dimension {}, target has {dim}",
                        center.len()
                    ));
                }
                if let Some(s) = scale {
                    if !(*s > T::zero()) {
                        v.push("initial scale must be positive".to_string());
                    }
                }
            }
        }
        match self.algorithm {
            Algorithm::Imtm | Algorithm::Gimtm | Algorithm::Aimtm1 => {
                v.extend(self.population().violations(self.chains));
            }
            Algorithm::Aimtm2 => {
                if self.chains < 2 {
                    v.push("aimtm2 needs N >= 2".to_string());
                }
                if self.kernels.len() + 1 != self.chains {
                    v.push(format!(
                        "aimtm2 needs M = N - 1 cold-chain kernels (got M = {}, N = {})",
                        self.kernels.len(),
                        self.chains
                    ));
                }
                if self.aux_kernels.len() + 1 != self.chains {
                    v.push(format!(
                        "aimtm2 needs N - 1 auxiliary kernels (got {}, N = {})",
                        self.aux_kernels.len(),
                        self.chains
                    ));
                }
            }
            Algorithm::RandomRay => {
                if self.chains <= self.trials {
                    v.push(format!(
                        "random anchor selection requires N > M (got N = {}, M = {})",
                        self.chains, self.trials
                    ));
                }
                if !(self.ray_variance > T::zero()) {
                    v.push("ray variance must be positive".to_string());
                }
            }
            Algorithm::Mh | Algorithm::Mtm | Algorithm::MtmDp => {}
        }
        if matches!(self.algorithm, Algorithm::Aimtm1 | Algorithm::Aimtm2) {
            match &self.ladder {
                Some(l) if l.len() != self.chains => v.push(format!(
                    "ladder has {} rungs for {} chains",
                    l.len(),
                    self.chains
                )),
                _ => {}
            }
        }
        v
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let v = self.violations(dim);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }
}

/// Output of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutput<T> {
    pub trace: ChainTrace<T>,
    pub counters: Counters,
}

/// Runs the configured sampler and returns its full trace. Deterministic in
/// `config.seed`.
pub fn run<T: Real, G: Target<T> + ?Sized>(config: &SamplerConfig<T>, target: &G) -> Result<RunOutput<T>> {
    let dim = target.dim();
    config.validate(dim)?;
    let n = config.chains;
    let mut init_rng = RngStream::new(config.seed, u64::MAX);
    let start = match &config.init {
        Initialization::Explicit(p) => p.clone(),
        Initialization::Overdispersed { center, scale } => {
            let s = scale.unwrap_or_else(|| {
                let k = config
                    .kernels
                    .iter()
                    .map(Kernel::max_scale)
                    .fold(T::zero(), T::max);
                T::of(10.0) * if k > T::zero() { k } else { config.ray_variance.sqrt() }
            });
            overdispersed_start(&mut init_rng, target, center, s, n)?
        }
    };
    let mut pop = PopulationState::new(start)?;
    let mut rngs = RngStream::family(config.seed, 0, n);
    let mut trace = ChainTrace::starting_at(&pop);
    let mut counters = Counters::default();
    let slots = match config.algorithm {
        Algorithm::Mtm => config.trials,
        Algorithm::Aimtm2 => n.saturating_sub(1),
        _ => config.kernels.len(),
    };
    let mut nu = NuTracker::new(slots.max(1), n);
    let cfg = config.population();
    let ladder = config
        .ladder
        .clone()
        .unwrap_or_else(|| TemperatureLadder::harmonic(n));
    let ray = RayConfig {
        trials: config.trials,
        variance: config.ray_variance,
        policy: config.policy,
        parallel: config.parallel,
    };

    for _ in 0..config.iterations {
        let c = match config.algorithm {
            Algorithm::Mh | Algorithm::Mtm | Algorithm::MtmDp => {
                let steps: Vec<Step<T>> = pop
                    .positions
                    .iter()
                    .zip(rngs.iter_mut())
                    .map(|(x, rng)| match config.algorithm {
                        Algorithm::Mh => mh_step(rng, x, target, &config.kernels[0]),
                        Algorithm::Mtm => {
                            mtm_step(rng, x, target, &config.kernels[0], config.trials, &config.policy)
                        }
                        _ => mtm_dp_step(rng, x, target, &config.kernels, &config.policy),
                    })
                    .collect::<Result<_>>()?;
                let c = pop.record(steps);
                nu.update(&pop.selected);
                c
            }
            Algorithm::Imtm => imtm_step(&mut pop, target, &cfg, &mut rngs, &mut nu)?,
            Algorithm::Gimtm => gimtm_step(&mut pop, target, &cfg, &mut rngs, &mut nu)?,
            Algorithm::Aimtm1 => aimtm1_step(&mut pop, target, &ladder, &cfg, &mut rngs, &mut nu)?,
            Algorithm::Aimtm2 => aimtm2_step(
                &mut pop,
                target,
                &ladder,
                &cfg,
                &config.aux_kernels,
                &mut rngs,
                &mut nu,
            )?,
            Algorithm::RandomRay => random_ray_step(&mut pop, target, &ray, &mut rngs)?,
        };
        counters.merge(&c);
        trace.record(&pop, nu.nu());
    }
    Ok(RunOutput { trace, counters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposals::{AnchoredRw, GaussianRw};
    use crate::targets::Gaussian;

    fn base() -> SamplerConfig<f64> {
        SamplerConfig::new(
            Algorithm::Mh,
            vec![GaussianRw::isotropic(2, 1.0).into()],
            Initialization::Overdispersed {
                center: vec![0.0, 0.0],
                scale: None,
            },
        )
    }

    #[test]
    fn zero_iterations_give_initial_state_only() {
        let mut c = base();
        c.iterations = 0;
        c.chains = 3;
        let out = run(&c, &Gaussian::standard(2)).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace.rows(), 3);
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut c = base();
        c.algorithm = Algorithm::Imtm;
        c.chains = 6;
        c.kernels = (1..=3).map(|j| AnchoredRw::isotropic(2, j as f64).into()).collect();
        c.anchors = AnchorStrategy::Uniform;
        c.iterations = 50;
        c.seed = 17;
        let bytes = |c: &SamplerConfig<f64>| {
            let mut buf = Vec::new();
            run(c, &Gaussian::standard(2)).unwrap().trace.write_csv(&mut buf).unwrap();
            buf
        };
        assert_eq!(bytes(&c), bytes(&c));
        let mut other = c.clone();
        other.seed = 18;
        assert_ne!(bytes(&c), bytes(&other));
    }

    #[test]
    fn anchored_config_with_too_few_chains_is_rejected() {
        let mut c = base();
        c.algorithm = Algorithm::Imtm;
        c.chains = 3;
        c.kernels = vec![AnchoredRw::isotropic(2, 1.0).into(); 3];
        c.anchors = AnchorStrategy::Uniform;
        c.init = Initialization::Overdispersed {
            center: vec![0.0],
            scale: Some(-1.0),
        };
        match run(&c, &Gaussian::standard(2)) {
            Err(Error::InvalidConfig(v)) => {
                assert!(v.iter().any(|m| m.contains("N > M")));
                assert!(v.len() >= 3);
            }
            other => panic!("{other:?}"),
        }
    }
}

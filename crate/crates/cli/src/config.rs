//! Experiment configuration: TOML with `[target]`, `[sampler]` and
//! `[diagnostics]` sections. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use imtm::experiments::betabinomial::Synthetic;
use imtm::mathcore::{RngStream, SpdMatrix};
use imtm::proposals::KernelSpec;
use imtm::samplers::{Algorithm, AnchorStrategy, Initialization, SamplerConfig, TemperatureLadder};
use imtm::targets::{
    read_loh_csv, BetaBinomialPosterior, Gaussian, GaussianMixture, GridTarget, Target, Tempered,
};
use imtm::weights::LambdaPolicy;
use serde::{Deserialize, Serialize};

use crate::diag::DiagSpec;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub target: TargetSection,
    pub sampler: SamplerSection,
    #[serde(default)]
    pub diagnostics: DiagSpec,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    /// gaussian, bimodal, mixture, wishart-mixture, grid, betabinomial
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variances: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<Vec<f64>>>,
    /// Diagonal covariance of each mixture component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_variances: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<bool>,
    /// Raise the density to this power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub algorithm: String,
    #[serde(default = "one")]
    pub chains: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_chain_trials: Vec<usize>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub kernels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux_kernels: Vec<String>,
    #[serde(default = "default_anchors")]
    pub anchors: String,
    #[serde(default = "default_lambda")]
    pub lambda: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(default = "default_ray_variance")]
    pub ray_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_scale: Option<f64>,
    #[serde(default = "yes")]
    pub parallel: bool,
}

fn default_iterations() -> usize {
    1000
}
fn default_anchors() -> String {
    "fixed".into()
}
fn default_lambda() -> String {
    "power(1)".into()
}
fn default_ray_variance() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

/// A configuration error (exit code 2) as opposed to a sampler failure.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| invalid(format!("{}: {e:#}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        if cfg.replicates == 0 {
            bail!(invalid("replicates must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build_target(&self) -> Result<Box<dyn Target<f64>>> {
        build_target(&self.target, self.seed).map_err(|e| invalid(format!("[target] {e:#}")))
    }

    /// Sampler configuration for replicate seed `seed`.
    pub fn build_sampler(&self, dim: usize, seed: u64) -> Result<SamplerConfig<f64>> {
        build_sampler(&self.sampler, dim, seed).map_err(|e| invalid(format!("[sampler] {e:#}")))
    }
}

fn need<'a, T>(v: &'a Option<T>, key: &str, kind: &str) -> Result<&'a T> {
    v.as_ref().with_context(|| format!("target kind `{kind}` needs `{key}`"))
}

fn build_target(t: &TargetSection, seed: u64) -> Result<Box<dyn Target<f64>>> {
    let base: Box<dyn Target<f64>> = match t.kind.as_str() {
        "gaussian" => {
            let dim = t
                .dim
                .or(t.mean.as_ref().map(Vec::len))
                .or(t.variances.as_ref().map(Vec::len))
                .context("target kind `gaussian` needs `dim`, `mean` or `variances`")?;
            let mean = t.mean.clone().unwrap_or_else(|| vec![0.0; dim]);
            let vars = t.variances.clone().unwrap_or_else(|| vec![1.0; dim]);
            Box::new(Gaussian::new(mean, SpdMatrix::diagonal(&vars)?)?)
        }
        "bimodal" => Box::new(GaussianMixture::<f64>::bimodal_2d()),
        "mixture" => {
            let w = need(&t.weights, "weights", "mixture")?.clone();
            let means = need(&t.means, "means", "mixture")?.clone();
            let vars = need(&t.component_variances, "component_variances", "mixture")?;
            let covs = vars
                .iter()
                .map(|v| SpdMatrix::diagonal(v))
                .collect::<imtm::Result<Vec<_>>>()?;
            Box::new(GaussianMixture::new(w, means, covs)?)
        }
        "wishart-mixture" => {
            let dim = *need(&t.dim, "dim", "wishart-mixture")?;
            let dof = t.dof.unwrap_or(dim as f64 + 1.0);
            let mut rng = RngStream::new(seed, u64::MAX - 1);
            Box::new(GaussianMixture::wishart_bimodal(&mut rng, dim, dof)?)
        }
        "grid" => Box::new(GridTarget::new(need(&t.masses, "masses", "grid")?.clone())?),
        "betabinomial" => {
            let obs = match (&t.data, t.synthetic.unwrap_or(false)) {
                (Some(p), _) => read_loh_csv(p)?,
                (None, true) => Synthetic::canned().generate(seed),
                (None, false) => bail!("target kind `betabinomial` needs `data` or `synthetic = true`"),
            };
            Box::new(BetaBinomialPosterior::new(obs)?)
        }
        other => bail!(
            "unknown target kind `{other}` (expected gaussian, bimodal, mixture, wishart-mixture, grid, betabinomial)"
        ),
    };
    Ok(match t.exponent {
        Some(xi) => Box::new(Tempered::new(base, xi)?),
        None => base,
    })
}

fn build_sampler(s: &SamplerSection, dim: usize, seed: u64) -> Result<SamplerConfig<f64>> {
    let algorithm: Algorithm = s.algorithm.parse()?;
    let kernel = |text: &String| -> Result<_> {
        let spec: KernelSpec = text.parse()?;
        Ok(spec.build::<f64>(dim)?)
    };
    let kernels = s.kernels.iter().map(kernel).collect::<Result<Vec<_>>>()?;
    let aux_kernels = s.aux_kernels.iter().map(kernel).collect::<Result<Vec<_>>>()?;
    let init = match (&s.init, &s.init_center) {
        (Some(_), Some(_)) => bail!("give either `init` or `init_center`, not both"),
        (Some(points), None) => Initialization::Explicit(points.clone()),
        (None, center) => Initialization::Overdispersed {
            center: center.clone().unwrap_or_else(|| vec![0.0; dim]),
            scale: s.init_scale,
        },
    };
    let mut c = SamplerConfig::new(algorithm, kernels, init);
    c.chains = s.chains;
    c.trials = s.trials;
    c.per_chain_trials = s.per_chain_trials.clone();
    c.aux_kernels = aux_kernels;
    c.anchors = AnchorStrategy::parse(&s.anchors).with_context(|| {
        format!(
            "unknown anchor strategy `{}` (expected fixed, slot, uniform, others, nu, self, ladder)",
            s.anchors
        )
    })?;
    c.policy = s.lambda.parse::<LambdaPolicy>()?;
    c.ladder = s.ladder.clone().map(TemperatureLadder::new).transpose()?;
    c.ray_variance = s.ray_variance;
    c.iterations = s.iterations;
    c.seed = seed;
    c.parallel = s.parallel;
    c.validate(dim)?;
    Ok(c)
}

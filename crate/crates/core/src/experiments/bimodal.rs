//! Interacting population on the bivariate mixture: `M = N` anchored kernels,
//! slot `j` centred at chain `j` with covariance `(0.1 + 5j)·I`.

use super::{cell, ExperimentOutput, Table};
use crate::diagnostics::{mode_jumps, nearest_mode, ComparisonReport, MethodSummary};
use crate::error::Result;
use crate::proposals::{AnchoredRw, Kernel};
use crate::samplers::{run as run_sampler, Algorithm, AnchorStrategy, Initialization, SamplerConfig};
use crate::targets::GaussianMixture;
use crate::trace::ChainTrace;
use crate::weights::{LambdaKind, LambdaPolicy};

#[derive(Clone, Debug)]
pub struct Settings {
    pub chains: usize,
    pub iterations: usize,
    pub seed: u64,
    pub init_center: Vec<f64>,
    pub init_scale: f64,
}

impl Settings {
    pub fn canned(seed: u64) -> Self {
        Self {
            chains: 50,
            iterations: 1_000,
            seed,
            init_center: vec![5.0, 5.0],
            init_scale: 10.0,
        }
    }
}

/// Importance-sampling and symmetric ("IS", "TA") weight variants.
pub const VARIANTS: [(&str, LambdaPolicy); 2] = [
    ("imtm-is", LambdaPolicy::plain(LambdaKind::PowerProduct(1.0))),
    ("imtm-ta", LambdaPolicy::plain(LambdaKind::Harmonic)),
];

pub fn kernels(m: usize) -> Vec<Kernel<f64>> {
    (1..=m)
        .map(|j| AnchoredRw::isotropic(2, 0.1 + 5.0 * j as f64).into())
        .collect()
}

pub fn config(s: &Settings, policy: LambdaPolicy) -> SamplerConfig<f64> {
    let mut c = SamplerConfig::new(
        Algorithm::Imtm,
        kernels(s.chains),
        Initialization::Overdispersed {
            center: s.init_center.clone(),
            scale: Some(s.init_scale),
        },
    );
    c.chains = s.chains;
    c.anchors = AnchorStrategy::SlotToChain;
    c.policy = policy;
    c.iterations = s.iterations;
    c.seed = s.seed;
    c
}

pub const CENTERS: [[f64; 2]; 2] = [[0.0, 0.0], [10.0, 10.0]];

#[derive(Clone, Debug)]
pub struct VariantResult {
    pub name: &'static str,
    /// Mode-2 fraction over the last quarter of iterations, all chains.
    pub final_quarter_mode2: f64,
    /// Mode-2 fraction of the final population.
    pub final_mode2: f64,
    /// Chains whose path switches mode at least once.
    pub crossing_chains: usize,
    /// Pooled final-quarter mean.
    pub mean: Vec<f64>,
    pub acceptance: f64,
    pub trace: ChainTrace<f64>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub variants: Vec<VariantResult>,
}

pub fn summarize(name: &'static str, trace: ChainTrace<f64>) -> VariantResult {
    let centers: Vec<Vec<f64>> = CENTERS.iter().map(|c| c.to_vec()).collect();
    let len = trace.len();
    let from = (len - 1) - (len - 1) / 4;
    let pooled = trace.pooled(from);
    let mode2 = |xs: &[Vec<f64>]| xs.iter().filter(|x| nearest_mode(x, &centers) == 1).count() as f64 / xs.len() as f64;
    let last: Vec<Vec<f64>> = (0..trace.chains()).map(|c| trace.position(len - 1, c).to_vec()).collect();
    let crossing_chains = (0..trace.chains())
        .filter(|&c| {
            let path: Vec<Vec<f64>> = (1..len).map(|n| trace.position(n, c).to_vec()).collect();
            mode_jumps(&path, &centers) > 0
        })
        .count();
    let mean = (0..trace.dim())
        .map(|k| pooled.iter().map(|x| x[k]).sum::<f64>() / pooled.len() as f64)
        .collect();
    VariantResult {
        name,
        final_quarter_mode2: mode2(&pooled),
        final_mode2: mode2(&last),
        crossing_chains,
        mean,
        acceptance: trace.acceptance_rate(),
        trace,
    }
}

pub fn run(s: &Settings) -> Result<Outcome> {
    let target = GaussianMixture::<f64>::bimodal_2d();
    let variants = VARIANTS
        .iter()
        .map(|&(name, policy)| Ok(summarize(name, run_sampler(&config(s, policy), &target)?.trace)))
        .collect::<Result<_>>()?;
    Ok(Outcome {
        settings: s.clone(),
        variants,
    })
}

impl Outcome {
    pub fn output(self) -> ExperimentOutput {
        let mut report = ComparisonReport::new(format!(
            "interacting population on the bivariate mixture, N = M = {}, {} iterations",
            self.settings.chains, self.settings.iterations
        ));
        let mut final_pop = Table::new("final_population", &["method", "chain", "x_1", "x_2"]);
        let mut traces = Vec::new();
        for v in self.variants {
            let n = v.trace.chains();
            let mut m = MethodSummary::new(v.name, vec![self.settings.seed]);
            m.push("final_quarter_mode2_occupancy", v.final_quarter_mode2, n);
            m.push("final_mode2_occupancy", v.final_mode2, n);
            m.push("chains_crossing_modes", v.crossing_chains as f64, n);
            m.push("final_quarter_mean_x1", v.mean[0], n);
            m.push("final_quarter_mean_x2", v.mean[1], n);
            m.push("acceptance", v.acceptance, n);
            report.methods.push(m);
            let last = v.trace.len() - 1;
            for c in 0..n {
                let x = v.trace.position(last, c);
                final_pop.push(vec![v.name.to_string(), (c + 1).to_string(), cell(x[0]), cell(x[1])]);
            }
            traces.push((format!("{}_seed{}", v.name, self.settings.seed), v.trace));
        }
        report.verdicts.push("target mode-2 mass 2/3, target mean (20/3, 20/3)".to_string());
        ExperimentOutput {
            report,
            traces,
            tables: vec![final_pop],
        }
    }
}

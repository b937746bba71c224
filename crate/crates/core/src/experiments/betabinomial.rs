//! Interacting population on the LOH binomial / beta-binomial posterior.

use super::{cell, ExperimentOutput, Table};
use crate::diagnostics::{two_means, ClusterSplit, ComparisonReport, MethodSummary};
use crate::error::Result;
use crate::mathcore::{RngStream, SpdMatrix};
use crate::proposals::{AnchoredRw, Kernel};
use crate::samplers::{run as run_sampler, Algorithm, AnchorStrategy, Initialization, SamplerConfig};
use crate::targets::{BetaBinomialPosterior, LohObservation};
use crate::trace::ChainTrace;
use crate::weights::LambdaPolicy;

/// Synthetic data drawn from the model itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthetic {
    pub pairs: usize,
    /// `(η, π₁, π₂, γ)`.
    pub params: [f64; 4],
    /// Inclusive range of examined-section counts.
    pub sections: (u32, u32),
}

impl Synthetic {
    pub fn canned() -> Self {
        Self {
            pairs: 40,
            params: [0.9, 0.2, 0.8, 0.0],
            sections: (10, 30),
        }
    }

    pub fn generate(&self, seed: u64) -> Vec<LohObservation> {
        let mut rng = RngStream::new(seed, DATA_STREAM);
        BetaBinomialPosterior::simulate(&mut rng, self.pairs, self.sections, self.params)
    }
}

const DATA_STREAM: u64 = u64::MAX - 2;
const INIT_STREAM: u64 = u64::MAX - 3;

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Observed(Vec<LohObservation>),
    Synthetic(Synthetic),
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub data: DataSource,
    pub chains: usize,
    pub iterations: usize,
    /// Iterations at which the population is summarized.
    pub horizons: Vec<usize>,
    pub seed: u64,
}

impl Settings {
    pub fn canned(seed: u64, data: DataSource) -> Self {
        Self {
            data,
            chains: 100,
            iterations: 1_000,
            horizons: vec![100, 1_000],
            seed,
        }
    }

    pub fn observations(&self) -> Vec<LohObservation> {
        match &self.data {
            DataSource::Observed(d) => d.clone(),
            DataSource::Synthetic(s) => s.generate(self.seed),
        }
    }
}

/// Standard deviations per slot for the probabilities and for γ.
pub const SLOT_SCALES: [(f64, f64); 4] = [(0.01, 0.25), (0.03, 0.5), (0.1, 1.0), (0.3, 2.0)];

pub fn kernels() -> Vec<Kernel<f64>> {
    SLOT_SCALES
        .iter()
        .map(|&(p, g)| {
            let cov = SpdMatrix::diagonal(&[p * p, p * p, p * p, g * g]).expect("positive diagonal");
            AnchoredRw::new(cov).into()
        })
        .collect()
}

/// Chains start uniformly over `[0,1]³ × [-3, 3]`.
pub fn initial_population(chains: usize, seed: u64) -> Vec<Vec<f64>> {
    use crate::real::Real;
    let mut rng = RngStream::new(seed, INIT_STREAM);
    (0..chains)
        .map(|_| {
            let mut x: Vec<f64> = (0..3).map(|_| f64::open_unit(&mut rng)).collect();
            x.push(6.0 * f64::open_unit(&mut rng) - 3.0);
            x
        })
        .collect()
}

pub fn config(s: &Settings) -> SamplerConfig<f64> {
    let mut c = SamplerConfig::new(
        Algorithm::Imtm,
        kernels(),
        Initialization::Explicit(initial_population(s.chains, s.seed)),
    );
    c.chains = s.chains;
    c.anchors = AnchorStrategy::UniformOthers;
    c.policy = LambdaPolicy::importance();
    c.iterations = s.iterations;
    c.seed = s.seed;
    c
}

/// Population snapshot in the `(π₁, π₂)` plane at one iteration.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub iteration: usize,
    pub points: Vec<Vec<f64>>,
    pub split: ClusterSplit,
    /// Fraction of chains with `π₁ < π₂`.
    pub ordered_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub observations: Vec<LohObservation>,
    pub snapshots: Vec<Snapshot>,
    pub trace: ChainTrace<f64>,
}

pub fn snapshot(trace: &ChainTrace<f64>, iteration: usize, seed: u64) -> Result<Snapshot> {
    let points: Vec<Vec<f64>> = (0..trace.chains())
        .map(|c| trace.position(iteration, c)[1..3].to_vec())
        .collect();
    let ordered = points.iter().filter(|p| p[0] < p[1]).count() as f64 / points.len() as f64;
    Ok(Snapshot {
        iteration,
        split: two_means(&points, 10, seed)?,
        points,
        ordered_fraction: ordered,
    })
}

pub fn run(s: &Settings) -> Result<Outcome> {
    let observations = s.observations();
    let target = BetaBinomialPosterior::new(observations.clone())?;
    let trace = run_sampler(&config(s), &target)?.trace;
    let snapshots = s
        .horizons
        .iter()
        .filter(|&&h| h < trace.len())
        .map(|&h| snapshot(&trace, h, s.seed))
        .collect::<Result<_>>()?;
    Ok(Outcome {
        settings: s.clone(),
        observations,
        snapshots,
        trace,
    })
}

impl Outcome {
    pub fn output(self) -> ExperimentOutput {
        let source = match self.settings.data {
            DataSource::Observed(_) => "ingested data",
            DataSource::Synthetic(_) => "synthetic data",
        };
        let mut report = ComparisonReport::new(format!(
            "LOH posterior ({source}, {} pairs), N = {}, M = {}, {} iterations",
            self.observations.len(),
            self.settings.chains,
            SLOT_SCALES.len(),
            self.settings.iterations
        ));
        let mut m = MethodSummary::new("imtm-is", vec![self.settings.seed]);
        let mut table = Table::new("population", &["iteration", "chain", "pi1", "pi2", "cluster"]);
        for s in &self.snapshots {
            let n = s.points.len();
            m.push(format!("separation_at_{}", s.iteration), s.split.separation, n);
            m.push(format!("smaller_cluster_at_{}", s.iteration), s.split.sizes[0].min(s.split.sizes[1]) as f64, n);
            m.push(format!("ordered_fraction_at_{}", s.iteration), s.ordered_fraction, n);
            for (c, (p, l)) in s.points.iter().zip(&s.split.labels).enumerate() {
                table.push(vec![s.iteration.to_string(), (c + 1).to_string(), cell(p[0]), cell(p[1]), l.to_string()]);
            }
            report.verdicts.push(format!(
                "iteration {}: clusters of {} and {} chains at ({:.3}, {:.3}) and ({:.3}, {:.3}), separation {:.2}",
                s.iteration,
                s.split.sizes[0],
                s.split.sizes[1],
                s.split.centers[0][0],
                s.split.centers[0][1],
                s.split.centers[1][0],
                s.split.centers[1][1],
                s.split.separation
            ));
        }
        m.push("acceptance", self.trace.acceptance_rate(), self.settings.chains);
        report.methods.push(m);
        let mut data = Table::new("data", &["x", "n"]);
        for o in &self.observations {
            data.push(vec![o.x.to_string(), o.n.to_string()]);
        }
        ExperimentOutput {
            report,
            traces: vec![(format!("imtm-is_seed{}", self.settings.seed), self.trace)],
            tables: vec![table, data],
        }
    }
}

//! Single-chain comparison on a 20-dimensional two-component mixture whose
//! covariances are Wishart draws.

use rayon::prelude::*;

use super::bivariate::{configs, METHODS};
use super::{cell, iact_or_inf, replicate_seed, ExperimentOutput, Table};
use crate::diagnostics::{median, ComparisonReport, MethodSummary};
use crate::error::Result;
use crate::mathcore::{acf, RngStream};
use crate::samplers::run as run_sampler;
use crate::targets::GaussianMixture;

/// Stream used to draw each seed's target covariances.
const TARGET_STREAM: u64 = u64::MAX - 1;

#[derive(Clone, Debug)]
pub struct Settings {
    pub dim: usize,
    pub dof: f64,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub burn_in: usize,
    pub max_lag: usize,
}

impl Settings {
    pub fn canned(seed: u64) -> Self {
        Self {
            dim: 20,
            dof: 21.0,
            iterations: 20_000,
            seeds: (0..5).map(|k| replicate_seed(seed, k)).collect(),
            burn_in: 2_000,
            max_lag: 30,
        }
    }
}

/// The mixture drawn for `seed`.
pub fn target(s: &Settings, seed: u64) -> Result<GaussianMixture<f64>> {
    GaussianMixture::wishart_bimodal(&mut RngStream::new(seed, TARGET_STREAM), s.dim, s.dof)
}

#[derive(Clone, Debug)]
pub struct SeedResult {
    pub seed: u64,
    /// `[method][coordinate]`.
    pub iact: [Vec<f64>; 2],
    pub acf: [Vec<Vec<f64>>; 2],
    pub acceptance: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub seeds: Vec<SeedResult>,
}

pub fn run(s: &Settings) -> Result<Outcome> {
    let seeds = s
        .seeds
        .par_iter()
        .map(|&seed| {
            let t = target(s, seed)?;
            let start = t.mean();
            let [dp, mix] = configs(s.dim, &start, s.iterations, seed)?;
            let mut iact = [Vec::new(), Vec::new()];
            let mut acfs = [Vec::new(), Vec::new()];
            let mut acceptance = [0.0; 2];
            for (k, cfg) in [dp, mix].iter().enumerate() {
                let trace = run_sampler(cfg, &t)?.trace;
                for c in 0..s.dim {
                    let series = trace.series(0, c, s.burn_in);
                    iact[k].push(iact_or_inf(&series));
                    acfs[k].push(acf(&series, s.max_lag).unwrap_or_else(|_| vec![f64::NAN; s.max_lag + 1]));
                }
                acceptance[k] = trace.acceptance_rate();
            }
            Ok(SeedResult {
                seed,
                iact,
                acf: acfs,
                acceptance,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        settings: s.clone(),
        seeds,
    })
}

impl Outcome {
    /// Per-coordinate median IACT over seeds, `[method][coordinate]`.
    pub fn median_iact(&self) -> [Vec<f64>; 2] {
        let per = |k: usize| {
            (0..self.settings.dim)
                .map(|c| median(&self.seeds.iter().map(|r| r.iact[k][c]).collect::<Vec<_>>()).unwrap_or(f64::NAN))
                .collect()
        };
        [per(0), per(1)]
    }

    /// Coordinates on which the differing-proposal sampler's median IACT is
    /// lower.
    pub fn wins(&self) -> usize {
        let [a, b] = self.median_iact();
        a.iter().zip(&b).filter(|(x, y)| x < y).count()
    }

    pub fn output(self) -> ExperimentOutput {
        let n = self.seeds.len();
        let seeds: Vec<u64> = self.seeds.iter().map(|r| r.seed).collect();
        let mut report = ComparisonReport::new(format!(
            "{}-dimensional Wishart mixture (dof {}), {} iterations, {} seeds",
            self.settings.dim, self.settings.dof, self.settings.iterations, n
        ));
        let med = self.median_iact();
        for (k, name) in METHODS.iter().enumerate() {
            let mut m = MethodSummary::new(*name, seeds.clone());
            for (c, v) in med[k].iter().enumerate() {
                m.push(format!("median_iact_x{}", c + 1), *v, n);
            }
            let acc = median(&self.seeds.iter().map(|r| r.acceptance[k]).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            m.push("median_acceptance", acc, n);
            report.methods.push(m);
        }
        report.verdicts.push(format!(
            "mtm-dp lower median IACT on {}/{} coordinates",
            self.wins(),
            self.settings.dim
        ));
        let mut acf_table = Table::new("acf", &["lag", "method", "seed", "coordinate", "acf"]);
        let mut iact_table = Table::new("iact", &["method", "seed", "coordinate", "iact"]);
        for r in &self.seeds {
            for (k, name) in METHODS.iter().enumerate() {
                for c in 0..self.settings.dim {
                    iact_table.push(vec![name.to_string(), r.seed.to_string(), (c + 1).to_string(), cell(r.iact[k][c])]);
                    for (lag, v) in r.acf[k][c].iter().enumerate() {
                        acf_table.push(vec![
                            lag.to_string(),
                            name.to_string(),
                            r.seed.to_string(),
                            (c + 1).to_string(),
                            cell(*v),
                        ]);
                    }
                }
            }
        }
        ExperimentOutput {
            report,
            traces: Vec::new(),
            tables: vec![acf_table, iact_table],
        }
    }
}

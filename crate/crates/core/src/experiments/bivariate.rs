//! Single-chain comparison on the bivariate mixture: multiple-try with four
//! distinct random-walk kernels against multiple-try with four draws from
//! their equal-weight mixture.

use rayon::prelude::*;

use super::{cell, iact_or_inf, replicate_seed, ExperimentOutput, Table};
use crate::diagnostics::{median, nearest_mode, sign_test_p, ComparisonReport, MethodSummary};
use crate::error::Result;
use crate::mathcore::{acf, SpdMatrix};
use crate::proposals::{GaussianRw, Kernel, MixtureRw};
use crate::samplers::{run as run_sampler, Algorithm, Initialization, SamplerConfig};
use crate::targets::GaussianMixture;
use crate::trace::ChainTrace;
use crate::weights::{LambdaKind, LambdaPolicy};

/// Random-walk variances `Λ₁..Λ₄` (times the identity).
pub const VARIANCES: [f64; 4] = [0.1, 5.0, 50.0, 100.0];

#[derive(Clone, Debug)]
pub struct Settings {
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub burn_in: usize,
    pub max_lag: usize,
    pub start: Vec<f64>,
}

impl Settings {
    /// 20,000 iterations over ten seeds derived from `seed`.
    pub fn canned(seed: u64) -> Self {
        Self {
            iterations: 20_000,
            seeds: (0..10).map(|k| replicate_seed(seed, k)).collect(),
            burn_in: 1_000,
            max_lag: 30,
            start: vec![5.0, 5.0],
        }
    }
}

/// Differing-proposal kernels, one per variance.
pub fn dp_kernels(dim: usize) -> Vec<Kernel<f64>> {
    VARIANCES.iter().map(|&v| GaussianRw::isotropic(dim, v).into()).collect()
}

/// Equal-weight mixture of the same four random walks.
pub fn mixture_kernel(dim: usize) -> Result<Kernel<f64>> {
    let covs = VARIANCES
        .iter()
        .map(|&v| SpdMatrix::scaled_identity(dim, v))
        .collect();
    Ok(MixtureRw::new(vec![0.25; 4], covs)?.into())
}

/// Both configurations for one seed: `(mtm-dp, mtm)`.
pub fn configs(dim: usize, start: &[f64], iterations: usize, seed: u64) -> Result<[SamplerConfig<f64>; 2]> {
    let init = Initialization::Explicit(vec![start.to_vec()]);
    let mut dp = SamplerConfig::new(Algorithm::MtmDp, dp_kernels(dim), init.clone());
    let mut mix = SamplerConfig::new(Algorithm::Mtm, vec![mixture_kernel(dim)?], init);
    for c in [&mut dp, &mut mix] {
        c.policy = LambdaPolicy::plain(LambdaKind::Harmonic);
        c.iterations = iterations;
        c.seed = seed;
        c.parallel = false;
    }
    mix.trials = VARIANCES.len();
    Ok([dp, mix])
}

#[derive(Clone, Debug)]
pub struct SeedResult {
    pub seed: u64,
    /// IACT of every coordinate.
    pub iact: Vec<f64>,
    pub acf: Vec<f64>,
    pub acceptance: f64,
    pub mode2: f64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub dp: Vec<SeedResult>,
    pub mtm: Vec<SeedResult>,
    pub traces: [ChainTrace<f64>; 2],
}

pub const METHODS: [&str; 2] = ["mtm-dp", "mtm-mixture"];

fn summarize(trace: &ChainTrace<f64>, seed: u64, s: &Settings) -> Result<SeedResult> {
    let x1 = trace.series(0, 0, s.burn_in);
    let centers = [vec![0.0, 0.0], vec![10.0, 10.0]];
    let draws = trace.pooled(s.burn_in);
    let mode2 = draws.iter().filter(|x| nearest_mode(x, &centers) == 1).count() as f64 / draws.len() as f64;
    Ok(SeedResult {
        seed,
        iact: (0..trace.dim()).map(|k| iact_or_inf(&trace.series(0, k, s.burn_in))).collect(),
        acf: acf(&x1, s.max_lag).unwrap_or_else(|_| vec![f64::NAN; s.max_lag + 1]),
        acceptance: trace.acceptance_rate(),
        mode2,
    })
}

pub fn run(s: &Settings) -> Result<Outcome> {
    let target = GaussianMixture::<f64>::bimodal_2d();
    let runs: Vec<(SeedResult, SeedResult, Option<[ChainTrace<f64>; 2]>)> = s
        .seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| {
            let [dp, mix] = configs(2, &s.start, s.iterations, seed)?;
            let a = run_sampler(&dp, &target)?.trace;
            let b = run_sampler(&mix, &target)?.trace;
            let ra = summarize(&a, seed, s)?;
            let rb = summarize(&b, seed, s)?;
            Ok((ra, rb, (k == 0).then_some([a, b])))
        })
        .collect::<Result<_>>()?;
    let mut dp = Vec::new();
    let mut mtm = Vec::new();
    let mut traces = None;
    for (a, b, t) in runs {
        dp.push(a);
        mtm.push(b);
        if t.is_some() {
            traces = t;
        }
    }
    Ok(Outcome {
        settings: s.clone(),
        dp,
        mtm,
        traces: traces.unwrap_or_else(|| [ChainTrace::new(2, 1), ChainTrace::new(2, 1)]),
    })
}

impl Outcome {
    /// Seeds on which the differing-proposal sampler has the lower IACT for
    /// the first coordinate.
    pub fn wins(&self) -> usize {
        self.dp.iter().zip(&self.mtm).filter(|(a, b)| a.iact[0] < b.iact[0]).count()
    }

    pub fn sign_test_p(&self) -> f64 {
        sign_test_p(self.wins(), self.dp.len())
    }

    pub fn median_iact(&self) -> [f64; 2] {
        let m = |r: &[SeedResult]| median(&r.iter().map(|s| s.iact[0]).collect::<Vec<_>>()).unwrap_or(f64::NAN);
        [m(&self.dp), m(&self.mtm)]
    }

    pub fn median_lag1(&self) -> [f64; 2] {
        let m = |r: &[SeedResult]| median(&r.iter().map(|s| s.acf[1]).collect::<Vec<_>>()).unwrap_or(f64::NAN);
        [m(&self.dp), m(&self.mtm)]
    }

    pub fn output(self) -> ExperimentOutput {
        let mut report = ComparisonReport::new(format!(
            "bivariate mixture, {} iterations, {} seeds",
            self.settings.iterations,
            self.settings.seeds.len()
        ));
        let n = self.settings.seeds.len();
        for (name, rs) in METHODS.iter().zip([&self.dp, &self.mtm]) {
            let mut m = MethodSummary::new(*name, self.settings.seeds.clone());
            let med = |f: &dyn Fn(&SeedResult) -> f64| median(&rs.iter().map(f).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            m.push("median_iact_x1", med(&|r| r.iact[0]), n);
            m.push("median_iact_x2", med(&|r| r.iact[1]), n);
            m.push("median_acf_lag1_x1", med(&|r| r.acf[1]), n);
            m.push("median_acceptance", med(&|r| r.acceptance), n);
            m.push("median_mode2_occupancy", med(&|r| r.mode2), n);
            report.methods.push(m);
        }
        report.verdicts.push(format!(
            "mtm-dp lower IACT(x1) on {}/{} seeds, one-sided sign test p = {:.4}",
            self.wins(),
            n,
            self.sign_test_p()
        ));

        let mut acf_table = Table::new("acf", &["lag", "method", "seed", "acf_x1"]);
        let mut per_seed = Table::new("per_seed", &["method", "seed", "iact_x1", "iact_x2", "acceptance", "mode2_occupancy"]);
        for (name, rs) in METHODS.iter().zip([&self.dp, &self.mtm]) {
            for r in rs.iter() {
                for (lag, v) in r.acf.iter().enumerate() {
                    acf_table.push(vec![lag.to_string(), name.to_string(), r.seed.to_string(), cell(*v)]);
                }
                per_seed.push(vec![
                    name.to_string(),
                    r.seed.to_string(),
                    cell(r.iact[0]),
                    cell(r.iact[1]),
                    cell(r.acceptance),
                    cell(r.mode2),
                ]);
            }
        }
        let seed = self.settings.seeds.first().copied().unwrap_or(0);
        let [a, b] = self.traces;
        ExperimentOutput {
            report,
            traces: vec![(format!("mtm-dp_seed{seed}"), a), (format!("mtm-mixture_seed{seed}"), b)],
            tables: vec![acf_table, per_seed],
        }
    }
}

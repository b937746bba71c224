//! Stochastic volatility: multiple-try within Gibbs on an interacting
//! population against a long random-walk Metropolis-within-Gibbs chain, on
//! simulated datasets.

use rayon::prelude::*;

use super::{cell, replicate_seed, ExperimentOutput, Table};
use crate::diagnostics::{cumulative_rmse, mse_report, ComparisonReport, MethodSummary};
use crate::error::Result;
use crate::mathcore::RngStream;
use crate::real::Real;
use crate::samplers::{imtm_within_gibbs_step, mh_within_gibbs_step, GibbsConfig, MhGibbsConfig, SvPopulation};
use crate::targets::{LatentLevel, SvModel, SvState};

/// One data-generating setting `(α, φ, σ²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub alpha: f64,
    pub phi: f64,
    pub sigma2: f64,
}

impl Scenario {
    pub fn daily() -> Self {
        Self {
            name: "daily".into(),
            alpha: 0.0,
            phi: 0.99,
            sigma2: 0.01,
        }
    }

    pub fn weekly() -> Self {
        Self {
            name: "weekly".into(),
            alpha: 0.0,
            phi: 0.9,
            sigma2: 0.1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub scenarios: Vec<Scenario>,
    pub datasets: usize,
    pub len: usize,
    /// Independent runs of each sampler per dataset.
    pub replicates: usize,
    pub chains: usize,
    pub imtm_iterations: usize,
    pub mh_iterations: usize,
    /// Fraction of each run discarded before averaging.
    pub burn_in: f64,
    pub seed: u64,
}

impl Settings {
    pub fn canned(seed: u64) -> Self {
        Self {
            scenarios: vec![Scenario::daily(), Scenario::weekly()],
            datasets: 20,
            len: 200,
            replicates: 3,
            chains: 20,
            imtm_iterations: 1_000,
            mh_iterations: 100_000,
            burn_in: 0.5,
            seed,
        }
    }
}

/// Posterior-mean estimates from one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub phi: f64,
    pub sigma2: f64,
    pub h: Vec<f64>,
    pub acceptance: f64,
    pub overflows: u64,
}

#[derive(Default)]
struct Accumulator {
    phi: f64,
    sigma2: f64,
    h: Vec<f64>,
    count: usize,
}

impl Accumulator {
    fn add(&mut self, s: &SvState<f64>) {
        if self.h.is_empty() {
            self.h = vec![0.0; s.h.len()];
        }
        self.phi += s.phi;
        self.sigma2 += s.sigma2;
        for (a, v) in self.h.iter_mut().zip(&s.h) {
            *a += v;
        }
        self.count += 1;
    }

    fn finish(self, acceptance: f64, overflows: u64) -> Estimate {
        let n = self.count.max(1) as f64;
        Estimate {
            phi: self.phi / n,
            sigma2: self.sigma2 / n,
            h: self.h.into_iter().map(|v| v / n).collect(),
            acceptance,
            overflows,
        }
    }
}

const INIT_STREAM: u64 = u64::MAX - 4;
const MH_STREAM: u64 = u64::MAX - 5;

/// Overdispersed starting states: φ in (0.2, 0.95), σ² in (0.02, 0.5),
/// flat latent path.
pub fn initial_states(chains: usize, len: usize, seed: u64) -> Vec<SvState<f64>> {
    let mut rng = RngStream::new(seed, INIT_STREAM);
    (0..chains)
        .map(|_| SvState {
            beta2: 1.0,
            phi: 0.2 + 0.75 * f64::open_unit(&mut rng),
            sigma2: 0.02 + 0.48 * f64::open_unit(&mut rng),
            h: vec![0.0; len],
        })
        .collect()
}

pub fn simulate(scenario: &Scenario, len: usize, seed: u64, index: usize, dataset: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, ((index as u64) << 32) | dataset as u64);
    SvModel::<f64>::simulate(&mut rng, len, scenario.alpha, scenario.phi, scenario.sigma2)
}

/// IMTM-within-Gibbs estimate, pooling every chain after burn-in.
pub fn imtm_estimate(model: &SvModel<f64>, s: &Settings, seed: u64) -> Result<Estimate> {
    let mut pop = SvPopulation::new(initial_states(s.chains, model.len(), seed))?;
    let cfg = GibbsConfig {
        parallel: false,
        ..GibbsConfig::standard()
    };
    let mut rngs = RngStream::family(seed, 0, s.chains);
    let burn = (s.burn_in * s.imtm_iterations as f64) as usize;
    let mut acc = Accumulator::default();
    let (mut rate, mut overflows) = (0.0, 0);
    for n in 0..s.imtm_iterations {
        let (c, r) = imtm_within_gibbs_step(model, &mut pop, &cfg, &mut rngs)?;
        rate += r;
        overflows += c.overflows;
        if n >= burn {
            pop.states.iter().for_each(|st| acc.add(st));
        }
    }
    Ok(acc.finish(rate / s.imtm_iterations.max(1) as f64, overflows))
}

/// MH-within-Gibbs estimate from one long chain after burn-in.
pub fn mh_estimate(model: &SvModel<f64>, s: &Settings, seed: u64) -> Result<Estimate> {
    let mut state = initial_states(1, model.len(), seed).remove(0);
    let cfg = MhGibbsConfig::standard();
    let mut rng = RngStream::new(seed, MH_STREAM);
    let burn = (s.burn_in * s.mh_iterations as f64) as usize;
    let mut acc = Accumulator::default();
    let (mut rate, mut overflows) = (0.0, 0);
    for n in 0..s.mh_iterations {
        let (c, r) = mh_within_gibbs_step(model, &mut state, &cfg, &mut rng)?;
        rate += r;
        overflows += c.overflows;
        if n >= burn {
            acc.add(&state);
        }
    }
    Ok(acc.finish(rate / s.mh_iterations.max(1) as f64, overflows))
}

pub const METHODS: [&str; 2] = ["imtm-gibbs", "mh-gibbs"];

/// Both samplers' replicates on one dataset.
#[derive(Clone, Debug)]
pub struct DatasetResult {
    pub scenario: String,
    pub dataset: usize,
    pub truth_h: Vec<f64>,
    /// `[method][replicate]`.
    pub estimates: [Vec<Estimate>; 2],
    pub truth: (f64, f64),
}

fn sq(x: f64) -> f64 {
    x * x
}

impl DatasetResult {
    /// Mean squared error of φ over replicates.
    pub fn phi_mse(&self, method: usize) -> f64 {
        mean_of(self.estimates[method].iter().map(|e| sq(e.phi - self.truth.0)))
    }

    pub fn sigma2_mse(&self, method: usize) -> f64 {
        mean_of(self.estimates[method].iter().map(|e| sq(e.sigma2 - self.truth.1)))
    }

    /// Final cumulative RMSE of the latent path, averaged over replicates.
    pub fn h_rmse(&self, method: usize) -> f64 {
        mean_of(self.estimates[method].iter().map(|e| {
            *cumulative_rmse(&e.h, &self.truth_h)
                .expect("equal lengths")
                .last()
                .expect("non-empty path")
        }))
    }
}

fn mean_of(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n.max(1) as f64
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub settings: Settings,
    pub datasets: Vec<DatasetResult>,
}

pub fn run(s: &Settings) -> Result<Outcome> {
    let jobs: Vec<(usize, usize, usize, usize)> = (0..s.scenarios.len())
        .flat_map(|k| (0..s.datasets).flat_map(move |d| (0..s.replicates).flat_map(move |r| (0..2).map(move |m| (k, d, r, m)))))
        .collect();
    let runs: Vec<Estimate> = jobs
        .par_iter()
        .map(|&(k, d, r, m)| {
            let (y, _) = simulate(&s.scenarios[k], s.len, s.seed, k, d);
            let model = SvModel::new(y, LatentLevel::Beta)?;
            let seed = replicate_seed(s.seed, 1 + ((k * s.datasets + d) * s.replicates + r) as u64);
            if m == 0 {
                imtm_estimate(&model, s, seed)
            } else {
                mh_estimate(&model, s, seed)
            }
        })
        .collect::<Result<_>>()?;
    let mut datasets = Vec::new();
    let mut it = jobs.iter().zip(runs);
    for (k, sc) in s.scenarios.iter().enumerate() {
        for d in 0..s.datasets {
            let (_, h) = simulate(sc, s.len, s.seed, k, d);
            let mut estimates = [Vec::new(), Vec::new()];
            for _ in 0..s.replicates * 2 {
                let (&(_, _, _, m), e) = it.next().expect("one run per job");
                estimates[m].push(e);
            }
            datasets.push(DatasetResult {
                scenario: sc.name.clone(),
                dataset: d,
                truth_h: h,
                estimates,
                truth: (sc.phi, sc.sigma2),
            });
        }
    }
    Ok(Outcome {
        settings: s.clone(),
        datasets,
    })
}

impl Outcome {
    /// Datasets of `scenario` where the population sampler wins on each of
    /// φ-MSE, σ²-MSE and final latent RMSE.
    pub fn wins(&self, scenario: &str) -> (usize, usize, usize, usize) {
        let ds: Vec<&DatasetResult> = self.datasets.iter().filter(|d| d.scenario == scenario).collect();
        let count = |f: &dyn Fn(&DatasetResult, usize) -> f64| ds.iter().filter(|d| f(d, 0) < f(d, 1)).count();
        (
            count(&|d, m| d.phi_mse(m)),
            count(&|d, m| d.sigma2_mse(m)),
            count(&|d, m| d.h_rmse(m)),
            ds.len(),
        )
    }

    pub fn output(self) -> ExperimentOutput {
        let s = &self.settings;
        let mut report = ComparisonReport::new(format!(
            "stochastic volatility, {} datasets of length {} per setting, {} replicates; {} chains x {} iterations vs {} iterations",
            s.datasets, s.len, s.replicates, s.chains, s.imtm_iterations, s.mh_iterations
        ));
        let mut table = Table::new(
            "estimates",
            &["setting", "dataset", "method", "replicate", "phi", "sigma2", "h_rmse", "acceptance", "overflows"],
        );
        for sc in &s.scenarios {
            let ds: Vec<&DatasetResult> = self.datasets.iter().filter(|d| d.scenario == sc.name).collect();
            for (m, name) in METHODS.iter().enumerate() {
                let mut summary = MethodSummary::new(format!("{}-{}", sc.name, name), vec![s.seed]);
                let phis: Vec<f64> = ds.iter().flat_map(|d| d.estimates[m].iter().map(|e| e.phi)).collect();
                let s2: Vec<f64> = ds.iter().flat_map(|d| d.estimates[m].iter().map(|e| e.sigma2)).collect();
                if let Ok(r) = mse_report(&phis, sc.phi) {
                    summary.push("phi_mse", r.mse, r.replicates);
                    summary.push("phi_mse_sd", r.sd, r.replicates);
                }
                if let Ok(r) = mse_report(&s2, sc.sigma2) {
                    summary.push("sigma2_mse", r.mse, r.replicates);
                    summary.push("sigma2_mse_sd", r.sd, r.replicates);
                }
                summary.push("h_final_rmse", mean_of(ds.iter().map(|d| d.h_rmse(m))), ds.len());
                summary.push(
                    "acceptance",
                    mean_of(ds.iter().flat_map(|d| d.estimates[m].iter().map(|e| e.acceptance))),
                    phis.len(),
                );
                report.methods.push(summary);
                for d in &ds {
                    for (r, e) in d.estimates[m].iter().enumerate() {
                        let rmse = *cumulative_rmse(&e.h, &d.truth_h).expect("equal lengths").last().expect("non-empty");
                        table.push(vec![
                            sc.name.clone(),
                            (d.dataset + 1).to_string(),
                            name.to_string(),
                            (r + 1).to_string(),
                            cell(e.phi),
                            cell(e.sigma2),
                            cell(rmse),
                            cell(e.acceptance),
                            e.overflows.to_string(),
                        ]);
                    }
                }
            }
            let (p, v, h, n) = self.wins(&sc.name);
            report.verdicts.push(format!(
                "{}: imtm-gibbs lower phi MSE on {p}/{n}, sigma2 MSE on {v}/{n}, final h RMSE on {h}/{n} datasets",
                sc.name
            ));
        }
        ExperimentOutput {
            report,
            traces: Vec::new(),
            tables: vec![table],
        }
    }
}

//! Canned experiments: the bivariate and 20-dimensional mixture comparisons,
//! the interacting population on the bivariate mixture, the LOH posterior,
//! and the stochastic volatility comparison.

pub mod betabinomial;
pub mod bimodal;
pub mod bivariate;
pub mod multivariate;
pub mod volatility;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::diagnostics::ComparisonReport;
use crate::error::{Error, Result};
use crate::mathcore::iact;
use crate::targets::LohObservation;
use crate::trace::{format_g17, ChainTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Bivariate,
    Multivariate,
    Bimodal,
    BetaBinomial,
    Volatility,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::Bivariate,
        ExperimentId::Multivariate,
        ExperimentId::Bimodal,
        ExperimentId::BetaBinomial,
        ExperimentId::Volatility,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::Bivariate => "e1-bivariate-mtmdp",
            ExperimentId::Multivariate => "e2-multivariate",
            ExperimentId::Bimodal => "e3-imtm-bimodal",
            ExperimentId::BetaBinomial => "e4-betabinomial",
            ExperimentId::Volatility => "e5-sv",
        }
    }

    pub fn valid_ids() -> String {
        Self::ALL.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s || e.name().split('-').next() == Some(s))
            .ok_or_else(|| {
                Error::Configuration(format!(
                    "unknown experiment `{s}` (valid ids: {})",
                    Self::valid_ids()
                ))
            })
    }
}

/// A small CSV table with preformatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join(","))?;
        }
        Ok(())
    }
}

/// Formats a number for a table cell.
pub fn cell(x: f64) -> String {
    format_g17(x)
}

/// Everything a canned experiment produces.
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub report: ComparisonReport,
    /// Named traces (file stem, trace).
    pub traces: Vec<(String, ChainTrace<f64>)>,
    pub tables: Vec<Table>,
}

/// Options shared by every canned experiment.
#[derive(Clone, Debug, Default)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// Use the synthetic LOH generator (e4).
    pub synthetic: bool,
    /// Ingested LOH observations (e4).
    pub data: Option<Vec<LohObservation>>,
}

/// Runs the canned configuration of `id`.
pub fn reproduce(id: ExperimentId, opts: &ReproduceOptions) -> Result<ExperimentOutput> {
    match id {
        ExperimentId::Bivariate => Ok(bivariate::run(&bivariate::Settings::canned(opts.seed))?.output()),
        ExperimentId::Multivariate => {
            Ok(multivariate::run(&multivariate::Settings::canned(opts.seed))?.output())
        }
        ExperimentId::Bimodal => Ok(bimodal::run(&bimodal::Settings::canned(opts.seed))?.output()),
        ExperimentId::BetaBinomial => {
            let data = match (&opts.data, opts.synthetic) {
                (Some(d), _) => betabinomial::DataSource::Observed(d.clone()),
                (None, true) => betabinomial::DataSource::Synthetic(betabinomial::Synthetic::canned()),
                (None, false) => {
                    return Err(Error::Configuration(
                        "e4-betabinomial needs a data CSV (--data) or --synthetic".into(),
                    ))
                }
            };
            Ok(betabinomial::run(&betabinomial::Settings::canned(opts.seed, data))?.output())
        }
        ExperimentId::Volatility => Ok(volatility::run(&volatility::Settings::canned(opts.seed))?.output()),
    }
}

/// IACT, with a chain that never moved reported as infinite.
pub fn iact_or_inf(series: &[f64]) -> f64 {
    match iact(series) {
        Ok(v) => v,
        Err(_) if series.windows(2).all(|w| w[0] == w[1]) => f64::INFINITY,
        Err(_) => f64::NAN,
    }
}

/// Seed of replicate `k` derived from a base seed.
pub fn replicate_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

//! Diagnostics computed from a trace alone.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use imtm::diagnostics::{hpd_interval, median, mode_occupancy, Mode};
use imtm::experiments::{cell, iact_or_inf, Table};
use imtm::mathcore::{acf, Matrix, SpdMatrix};
use imtm::trace::ChainTrace;
use serde::{Deserialize, Serialize};

use crate::config::invalid;

/// Which diagnostics to compute. Centers and covariances are written as
/// `"0 0; 10 10"` (rows separated by `;`, covariances row-major).
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acf_max_lag: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hpd_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy_centers: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy_covariances: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
}

impl DiagSpec {
    /// Reads a spec file (TOML keys) or an inline `key=value,key=value` list.
    pub fn from_arg(arg: &str) -> Result<Self> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            return toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())));
        }
        Self::parse_inline(arg).map_err(|e| invalid(format!("diagnostics spec: {e:#}")))
    }

    fn parse_inline(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .with_context(|| format!("expected key=value, got `{item}`"))?;
            let v = v.trim().trim_matches('"');
            let num = |v: &str| v.parse::<f64>().with_context(|| format!("`{k}` needs a number, got `{v}`"));
            let int = |v: &str| v.parse::<usize>().with_context(|| format!("`{k}` needs an integer, got `{v}`"));
            match k.trim() {
                "acf_max_lag" => spec.acf_max_lag = Some(int(v)?),
                "iact" => spec.iact = Some(v.parse().with_context(|| format!("`iact` needs true/false, got `{v}`"))?),
                "hpd_level" => spec.hpd_level = Some(num(v)?),
                "occupancy_centers" => spec.occupancy_centers = Some(v.to_string()),
                "occupancy_covariances" => spec.occupancy_covariances = Some(v.to_string()),
                "occupancy_radius" => spec.occupancy_radius = Some(num(v)?),
                "burn_in" => spec.burn_in = Some(int(v)?),
                other => bail!(
                    "unknown key `{other}` (expected acf_max_lag, iact, hpd_level, occupancy_centers, occupancy_covariances, occupancy_radius, burn_in)"
                ),
            }
        }
        Ok(spec)
    }

    pub fn is_empty(&self) -> bool {
        self.acf_max_lag.is_none()
            && self.iact != Some(true)
            && self.hpd_level.is_none()
            && self.occupancy_centers.is_none()
    }

    fn modes(&self, dim: usize) -> Result<Option<(Vec<Mode<f64>>, f64)>> {
        let Some(centers) = &self.occupancy_centers else {
            if self.occupancy_radius.is_some() || self.occupancy_covariances.is_some() {
                bail!("occupancy needs `occupancy_centers`");
            }
            return Ok(None);
        };
        let radius = self.occupancy_radius.context("occupancy needs `occupancy_radius`")?;
        let centers = parse_rows(centers, dim, "occupancy_centers")?;
        let modes = match &self.occupancy_covariances {
            None => centers.into_iter().map(Mode::euclidean).collect(),
            Some(c) => {
                let covs = parse_rows(c, dim * dim, "occupancy_covariances")?;
                if covs.len() != centers.len() {
                    bail!("{} covariances for {} centers", covs.len(), centers.len());
                }
                centers
                    .into_iter()
                    .zip(covs)
                    .map(|(m, c)| Ok(Mode::new(m, SpdMatrix::new(Matrix::new(dim, dim, c)?)?)?))
                    .collect::<Result<_>>()?
            }
        };
        Ok(Some((modes, radius)))
    }
}

fn parse_rows(text: &str, width: usize, key: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|row| {
            let v = row
                .split_whitespace()
                .map(|x| x.parse::<f64>().with_context(|| format!("`{key}`: bad number `{x}`")))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != width {
                bail!("`{key}`: row `{}` has {} entries, expected {width}", row.trim(), v.len());
            }
            Ok(v)
        })
        .collect()
}

/// Tables plus named scalar statistics.
#[derive(Clone, Debug, Default)]
pub struct DiagOutput {
    pub tables: Vec<Table>,
    pub stats: BTreeMap<String, f64>,
}

/// Every requested diagnostic. Request errors are validation errors.
pub fn compute(trace: &ChainTrace<f64>, spec: &DiagSpec) -> Result<DiagOutput> {
    compute_inner(trace, spec).map_err(|e| invalid(format!("diagnostics: {e:#}")))
}

fn compute_inner(trace: &ChainTrace<f64>, spec: &DiagSpec) -> Result<DiagOutput> {
    let burn = spec.burn_in.unwrap_or(0);
    if burn >= trace.len() {
        bail!("burn_in {burn} leaves no draws (trace has {} states per chain)", trace.len());
    }
    let (d, n) = (trace.dim(), trace.chains());
    let mut out = DiagOutput::default();
    out.stats.insert("acceptance".into(), trace.acceptance_rate());
    let pooled = trace.pooled(burn);
    for k in 0..d {
        let m = pooled.iter().map(|x| x[k]).sum::<f64>() / pooled.len() as f64;
        out.stats.insert(format!("mean_x{}", k + 1), m);
    }
    if let Some(lag) = spec.acf_max_lag {
        for k in 0..d {
            let mut header = vec!["lag".to_string()];
            header.extend((1..=n).map(|c| format!("chain_{c}")));
            let cols = (0..n)
                .map(|c| Ok(acf(&trace.series(c, k, burn), lag)?))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table {
                name: format!("acf_x{}", k + 1),
                header,
                rows: Vec::new(),
            };
            for l in 0..=lag {
                let mut row = vec![l.to_string()];
                row.extend(cols.iter().map(|c| cell(c[l])));
                t.push(row);
            }
            if let Some(v) = median(&cols.iter().map(|c| c[1.min(lag)]).collect::<Vec<_>>()) {
                out.stats.insert(format!("median_acf_lag1_x{}", k + 1), v);
            }
            out.tables.push(t);
        }
    }
    if spec.iact == Some(true) {
        let mut t = Table::new("iact", &["chain", "coordinate", "iact"]);
        for k in 0..d {
            let vals: Vec<f64> = (0..n).map(|c| iact_or_inf(&trace.series(c, k, burn))).collect();
            for (c, v) in vals.iter().enumerate() {
                t.push(vec![(c + 1).to_string(), (k + 1).to_string(), cell(*v)]);
            }
            if let Some(v) = median(&vals) {
                out.stats.insert(format!("median_iact_x{}", k + 1), v);
            }
        }
        out.tables.push(t);
    }
    if let Some(level) = spec.hpd_level {
        for k in 0..d {
            let xs: Vec<f64> = pooled.iter().map(|x| x[k]).collect();
            let (lo, hi) = hpd_interval(&xs, level)?;
            let mut t = Table::new(format!("hpd_x{}", k + 1), &["lower", "upper"]);
            t.push(vec![cell(lo), cell(hi)]);
            out.stats.insert(format!("hpd_lower_x{}", k + 1), lo);
            out.stats.insert(format!("hpd_upper_x{}", k + 1), hi);
            out.tables.push(t);
        }
    }
    if let Some((modes, radius)) = spec.modes(d)? {
        let occ = mode_occupancy(&pooled, &modes, radius)?;
        let mut t = Table::new("occupancy", &["mode", "fraction"]);
        for (i, f) in occ.iter().enumerate() {
            let name = if i < modes.len() { (i + 1).to_string() } else { "remainder".to_string() };
            out.stats.insert(format!("occupancy_{name}"), *f);
            t.push(vec![name, cell(*f)]);
        }
        out.tables.push(t);
    }
    Ok(out)
}

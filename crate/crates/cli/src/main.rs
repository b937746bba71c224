mod config;
mod diag;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use imtm::diagnostics::{ComparisonReport, MethodSummary};
use imtm::experiments::{self, replicate_seed, ExperimentId, ReproduceOptions};
use imtm::targets::read_loh_csv;
use imtm::trace::ChainTrace;

use config::{invalid, ExperimentConfig, Invalid};
use diag::DiagSpec;
use output::Outputs;

const OUT_ENV: &str = "IMTM_OUT_DIR";
const DEFAULT_OUT: &str = "imtm-out";

#[derive(Parser)]
#[command(name = "imtm", version, about = "Interacting multiple-try Metropolis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sampler described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (default: config `output`, then $IMTM_OUT_DIR, then ./imtm-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the canned experiments.
    Reproduce {
        /// e1-bivariate-mtmdp, e2-multivariate, e3-imtm-bimodal, e4-betabinomial or e5-sv
        id: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use generated LOH data (e4).
        #[arg(long)]
        synthetic: bool,
        /// LOH data CSV with header `x,n` (e4).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Compute diagnostics from a trace CSV.
    Diag {
        trace: PathBuf,
        /// Spec file or inline `key=value,...` (acf_max_lag, iact, hpd_level,
        /// occupancy_centers, occupancy_covariances, occupancy_radius, burn_in).
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, from_config: Option<PathBuf>) -> PathBuf {
    flag.or(from_config)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Reproduce {
            id,
            seed,
            out,
            synthetic,
            data,
        } => cmd_reproduce(&id, seed, out, synthetic, data),
        Command::Diag { trace, spec, out } => cmd_diag(&trace, &spec, out),
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<Invalid>().is_some()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn write_report(out: &mut Outputs, stem: &str, report: &ComparisonReport) -> Result<()> {
    out.write_with(&format!("report_{stem}.csv"), |w| Ok(report.write_csv(w)?))?;
    out.write(&format!("summary_{stem}.txt"), report.summary().as_bytes())?;
    Ok(())
}

fn cmd_run(path: &Path, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let cfg = ExperimentConfig::load(path)?;
    let target = cfg.build_target()?;
    let dim = target.dim();
    let seeds: Vec<u64> = (0..cfg.replicates as u64).map(|r| replicate_seed(cfg.seed, r)).collect();
    let samplers = seeds
        .iter()
        .map(|&s| cfg.build_sampler(dim, s))
        .collect::<Result<Vec<_>>>()?;
    let alg = samplers[0].algorithm.name();
    let started = Instant::now();
    let mut runs = Vec::new();
    for s in &samplers {
        let r = imtm::samplers::run(s, target.as_ref())
            .with_context(|| format!("{alg} run with seed {} failed", s.seed))?;
        let d = diag::compute(&r.trace, &cfg.diagnostics)?;
        runs.push((s.seed, r, d));
    }
    eprintln!("sampling took {:.2?}", started.elapsed());

    let mut report = ComparisonReport::new(format!(
        "{alg} on {} target, {} replicate(s), {} iterations",
        cfg.target.kind, cfg.replicates, cfg.sampler.iterations
    ));
    let mut summary = MethodSummary::new(alg, seeds.clone());
    let names: Vec<String> = runs[0].2.stats.keys().cloned().collect();
    for name in names {
        let vals: Vec<f64> = runs.iter().filter_map(|(_, _, d)| d.stats.get(&name).copied()).collect();
        summary.push(name, vals.iter().sum::<f64>() / vals.len() as f64, vals.len());
    }
    let total = |f: fn(&imtm::weights::Counters) -> u64| runs.iter().map(|(_, r, _)| f(&r.counters) as f64).sum::<f64>();
    summary.push("stuck_steps", total(|c| c.stuck), runs.len());
    summary.push("degenerate_weights", total(|c| c.degenerate_weights), runs.len());
    summary.push("degenerate_ratios", total(|c| c.degenerate_ratios), runs.len());
    summary.push("degenerate_directions", total(|c| c.degenerate_directions), runs.len());
    summary.push("overflows", total(|c| c.overflows), runs.len());
    report.methods.push(summary);

    let dir = out_dir(out, cfg.output.clone());
    let mut outputs = Outputs::new(&dir)?;
    for (seed, r, d) in &runs {
        let stem = format!("{alg}_seed{seed}");
        outputs.write_with(&format!("trace_{stem}.csv"), |w| Ok(r.trace.write_csv(w)?))?;
        for t in &d.tables {
            outputs.write_with(&format!("{}_{stem}.csv", t.name), |w| Ok(t.write_csv(w)?))?;
        }
    }
    write_report(&mut outputs, &format!("{alg}_seed{}", cfg.seed), &report)?;
    outputs.write("config_resolved.toml", cfg.to_toml().as_bytes())?;
    Ok(outputs.commit())
}

fn cmd_reproduce(
    id: &str,
    seed: u64,
    out: Option<PathBuf>,
    synthetic: bool,
    data: Option<PathBuf>,
) -> Result<Vec<PathBuf>> {
    let id: ExperimentId = id.parse().map_err(|e: imtm::Error| invalid(e.to_string()))?;
    let data = data
        .map(|p| read_loh_csv(&p).map_err(|e| invalid(format!("{}: {e}", p.display()))))
        .transpose()?;
    if id == ExperimentId::BetaBinomial && data.is_none() && !synthetic {
        return Err(invalid("e4-betabinomial needs a data CSV (--data) or --synthetic"));
    }
    let opts = ReproduceOptions { seed, synthetic, data };
    let started = Instant::now();
    let result = experiments::reproduce(id, &opts).with_context(|| format!("{id} failed"))?;
    eprintln!("{id} took {:.2?}", started.elapsed());
    let mut outputs = Outputs::new(&out_dir(out, None))?;
    let stem = format!("{id}_seed{seed}");
    for (name, trace) in &result.traces {
        outputs.write_with(&format!("trace_{}_{name}.csv", id.name()), |w| Ok(trace.write_csv(w)?))?;
    }
    for t in &result.tables {
        outputs.write_with(&format!("{}_{stem}.csv", t.name), |w| Ok(t.write_csv(w)?))?;
    }
    write_report(&mut outputs, &stem, &result.report)?;
    print!("{}", result.report.summary());
    Ok(outputs.commit())
}

fn cmd_diag(trace_path: &Path, spec: &str, out: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let spec = DiagSpec::from_arg(spec)?;
    if spec.is_empty() {
        return Err(invalid("diagnostics spec requests nothing"));
    }
    let file = std::fs::File::open(trace_path)
        .map_err(|e| invalid(format!("cannot read trace {}: {e}", trace_path.display())))?;
    let trace = ChainTrace::<f64>::read_csv(std::io::BufReader::new(file))
        .map_err(|e| invalid(format!("{}: {e}", trace_path.display())))?;
    let d = diag::compute(&trace, &spec)?;
    let stem = trace_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    let mut outputs = Outputs::new(&out_dir(out, None))?;
    for t in &d.tables {
        outputs.write_with(&format!("{stem}_{}.csv", t.name), |w| Ok(t.write_csv(w)?))?;
    }
    let mut text = format!("diagnostics of {}\n", trace_path.display());
    for (k, v) in &d.stats {
        text.push_str(&format!("  {k:<24} {v:.6}\n"));
    }
    outputs.write(&format!("{stem}_diag_summary.txt"), text.as_bytes())?;
    print!("{text}");
    Ok(outputs.commit())
}

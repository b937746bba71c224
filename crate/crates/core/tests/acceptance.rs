//! Acceptance suite: one PASS/FAIL line per criterion at its stated
//! tolerance.
//!
//! Criteria in `EXPECTED_FAILURES` are implemented at full tolerance but are
//! known not to hold for this implementation (see the README). The run fails
//! when any outcome differs from expectation, including an unexpected pass.

use std::time::{Duration, Instant};

use imtm::diagnostics::{detailed_balance_test, two_means, BalanceStatus};
use imtm::experiments::{betabinomial, bimodal, bivariate, multivariate, volatility};
use imtm::mathcore::RngStream;
use imtm::proposals::{AnchoredRw, Context, DiscreteGaussian, GaussianRw, Kernel, MixtureRw, Proposal};
use imtm::samplers::{
    anneal_estimate, mh_step, mtm_dp_step, mtm_step, mtm_transition_with_trials, run, Algorithm,
    AnchorStrategy, Initialization, SamplerConfig, TemperatureLadder, TrialSlot,
};
use imtm::targets::{BetaBinomialPosterior, Gaussian, GridTarget, Target};
use imtm::weights::{acceptance_ratio, select_trial, LambdaKind, LambdaPolicy, NuTracker};
use imtm::{Real, SpdMatrix64};
use rand::Rng;
use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, Normal};

const EXPECTED_FAILURES: &[u32] = &[3, 4, 6, 8, 10];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

const SEED: u64 = 1;

// Detailed balance of MTM-DP with three heterogeneous discrete kernels.

fn grid() -> GridTarget<f64> {
    GridTarget::new(vec![1.0, 3.0, 2.0, 5.0, 4.0]).unwrap()
}

fn dp_kernels() -> Vec<DiscreteGaussian<f64>> {
    vec![
        DiscreteGaussian::new(0.8, 0.0).unwrap(),
        DiscreteGaussian::new(2.5, 0.0).unwrap(),
        DiscreteGaussian::new(1.2, 1.0).unwrap(),
    ]
}

fn criterion_1() -> Verdict {
    let target = grid();
    let kernels = dp_kernels();
    let policy = LambdaPolicy::plain(LambdaKind::ConstOne);
    let probs = target.probabilities();
    let exact = |rng: &mut RngStream, s: usize| {
        let step = mtm_dp_step(rng, &target.point(s), &target, &kernels, &policy)?;
        Ok(target.state_of(&step.position).expect("stays on the grid"))
    };
    let mutated = |rng: &mut RngStream, s: usize| {
        let x = target.point(s);
        let slots: Vec<TrialSlot<'_, DiscreteGaussian<f64>, f64>> = kernels
            .iter()
            .map(|k| TrialSlot {
                kernel: k,
                anchor: None,
                nu: 1.0,
            })
            .collect();
        let (step, set) = mtm_transition_with_trials(rng, &target, &policy, &Context::single(&x), &slots)?;
        let Some(j) = set.selected else {
            return Ok(s);
        };
        let halved: Vec<f64> = set.reference.iter().map(|r| r - std::f64::consts::LN_2).collect();
        let rho = acceptance_ratio(&set.forward, &halved).rho;
        let _ = step;
        let y = if rho >= 1.0 || f64::open_unit(rng) < rho { &set.trials[j] } else { &x };
        Ok(target.state_of(y).expect("stays on the grid"))
    };
    let a = detailed_balance_test(exact, &probs, 10_000_000, SEED).unwrap();
    let b = detailed_balance_test(mutated, &probs, 10_000_000, SEED).unwrap();
    verdict(
        a.status == BalanceStatus::Pass && b.status == BalanceStatus::Fail,
        format!(
            "exact kernel {:?} (worst z {:.2}), halved-reference mutant {:?} (worst z {:.1})",
            a.status, a.worst_z, b.status, b.worst_z
        ),
    )
}

// MTM with one trial against a hand-written Metropolis sampler.

fn criterion_2() -> Verdict {
    let target = GridTarget::new(vec![1.0, 3.0]).unwrap();
    let kernel = DiscreteGaussian::new(1.0, 0.0).unwrap();
    let steps = 1_000_000;

    let mut rng = RngStream::new(SEED, 0);
    let mut x = vec![0.0];
    let mut ones = 0usize;
    for _ in 0..steps {
        x = mtm_step(&mut rng, &x, &target, &kernel, 1, &LambdaPolicy::plain(LambdaKind::Harmonic))
            .unwrap()
            .position;
        ones += usize::from(x[0] == 1.0);
    }
    let mtm = ones as f64 / steps as f64;

    // Reference: symmetric integer random walk with the same offset law.
    let masses = [1.0f64, 3.0];
    let offsets: Vec<(i64, f64)> = (-(kernel.reach())..=kernel.reach())
        .map(|k| (k, f64::exp(kernel.log_prob(k))))
        .collect();
    let total: f64 = offsets.iter().map(|o| o.1).sum();
    let mut rng = RngStream::new(SEED, 1);
    let mut s: i64 = 0;
    let mut ones = 0usize;
    for _ in 0..steps {
        let mut u = rng.random::<f64>() * total;
        let mut k = offsets[0].0;
        for &(off, p) in &offsets {
            k = off;
            if u < p {
                break;
            }
            u -= p;
        }
        let t = s + k;
        if (0..2).contains(&t) {
            let ratio = masses[t as usize] / masses[s as usize];
            if ratio >= 1.0 || rng.random::<f64>() < ratio {
                s = t;
            }
        }
        ones += usize::from(s == 1);
    }
    let reference = ones as f64 / steps as f64;
    verdict(
        (mtm - reference).abs() <= 0.005 && (mtm - 0.75).abs() <= 0.005,
        format!("MTM(M=1) occupancy {mtm:.4}, reference MH {reference:.4}, exact 0.75"),
    )
}

fn criterion_3() -> Verdict {
    let o = bivariate::run(&bivariate::Settings::canned(SEED)).unwrap();
    let [dp, mtm] = o.median_iact();
    verdict(
        o.sign_test_p() < 0.05,
        format!(
            "MTM-DP lower IACT on {}/{} seeds (p = {:.4}); median IACT {dp:.1} vs {mtm:.1}",
            o.wins(),
            o.dp.len(),
            o.sign_test_p()
        ),
    )
}

fn criterion_4() -> Verdict {
    let o = multivariate::run(&multivariate::Settings::canned(SEED)).unwrap();
    let wins = o.wins();
    verdict(wins >= 14, format!("MTM-DP lower median IACT on {wins}/20 coordinates"))
}

fn criteria_5_6() -> (Verdict, Verdict) {
    let o = bimodal::run(&bimodal::Settings::canned(SEED)).unwrap();
    let mut ok5 = true;
    let mut ok6 = true;
    let mut d5 = Vec::new();
    let mut d6 = Vec::new();
    for v in &o.variants {
        ok5 &= (v.final_quarter_mode2 - 2.0 / 3.0).abs() <= 0.10 && v.crossing_chains >= 1;
        ok6 &= v.mean.iter().all(|m| (m - 20.0 / 3.0).abs() <= 0.3);
        d5.push(format!("{} occupancy {:.3}, {} chains cross", v.name, v.final_quarter_mode2, v.crossing_chains));
        d6.push(format!("{} mean ({:.3}, {:.3})", v.name, v.mean[0], v.mean[1]));
    }
    (verdict(ok5, d5.join("; ")), verdict(ok6, d6.join("; ")))
}

fn criterion_7() -> Verdict {
    let target = Gaussian::standard(1);
    let ladder = TemperatureLadder::new(vec![1.0, 0.5, 0.25]).unwrap();
    let mut cfg = SamplerConfig::new(
        Algorithm::Aimtm1,
        vec![GaussianRw::isotropic(1, 1.0).into(), GaussianRw::isotropic(1, 9.0).into()],
        Initialization::Overdispersed {
            center: vec![0.0],
            scale: Some(3.0),
        },
    );
    cfg.chains = 3;
    cfg.ladder = Some(ladder.clone());
    cfg.policy = LambdaPolicy::importance();
    cfg.iterations = 50_000;
    cfg.seed = SEED;
    let trace = run(&cfg, &target).unwrap().trace;
    let burn = 1_000;
    let traces: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|c| (burn..trace.len()).map(|n| trace.position(n, c).to_vec()).collect())
        .collect();
    let first = anneal_estimate(&target, &ladder, &traces, |x| x[0]).unwrap();
    let unit = anneal_estimate(&target, &ladder, &traces, |_| 1.0).unwrap();
    verdict(
        first.value.abs() <= 0.05 && unit.value == 1.0,
        format!("E[x] estimate {:.4}, E[1] estimate {}", first.value, unit.value),
    )
}

fn criterion_8() -> Verdict {
    let mut s = volatility::Settings::canned(SEED);
    s.scenarios = vec![volatility::Scenario::weekly()];
    s.datasets = 5;
    let o = volatility::run(&s).unwrap();
    let (phi, sigma2, h, n) = o.wins("weekly");
    verdict(
        phi >= 4 && sigma2 >= 4 && h >= 3,
        format!("IMTM-within-Gibbs wins: phi MSE {phi}/{n}, sigma2 MSE {sigma2}/{n}, final h RMSE {h}/{n}"),
    )
}

// Invariant suites.

fn ks_p(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    let t = d * n.sqrt();
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * t * t).exp()
        })
        .sum();
    p.clamp(0.0, 1.0)
}

fn kernel_fit(failures: &mut Vec<String>) {
    let draws = 20_000;
    let mut rng = RngStream::new(SEED, 7);
    let x = [0.7];
    let ctx = Context::single(&x);
    let normal = |m: f64, v: f64| Normal::new(m, v.sqrt()).unwrap();

    let rw = GaussianRw::isotropic(1, 2.0);
    let xs: Vec<f64> = (0..draws).map(|_| rw.sample(&mut rng, &ctx)[0]).collect();
    let n = normal(0.7, 2.0);
    let p = ks_p(xs, |v| n.cdf(v));
    if p < 1e-3 {
        failures.push(format!("gaussian rw KS p = {p:.2e}"));
    }
    let y = [0.3];
    let dens = rw.log_density(&y, &ctx).unwrap();
    if (dens - n.ln_pdf(0.3)).abs() > 1e-12 {
        failures.push("gaussian rw density mismatch".into());
    }

    let covs = vec![SpdMatrix64::scaled_identity(1, 0.1), SpdMatrix64::scaled_identity(1, 25.0)];
    let mix = MixtureRw::new(vec![0.3, 0.7], covs).unwrap();
    let xs: Vec<f64> = (0..draws).map(|_| mix.sample(&mut rng, &ctx)[0]).collect();
    let (a, b) = (normal(0.7, 0.1), normal(0.7, 25.0));
    let p = ks_p(xs, |v| 0.3 * a.cdf(v) + 0.7 * b.cdf(v));
    if p < 1e-3 {
        failures.push(format!("mixture rw KS p = {p:.2e}"));
    }
    let dens = mix.log_density(&y, &ctx).unwrap();
    let direct = f64::ln(0.3 * a.pdf(0.3) + 0.7 * b.pdf(0.3));
    if (dens - direct).abs() > 1e-12 {
        failures.push("mixture rw density mismatch".into());
    }

    let snapshot = vec![vec![0.0], vec![4.0]];
    let pctx = Context::population(&snapshot[0], &snapshot, 0).with_anchor(Some(1));
    let anchored = AnchoredRw::isotropic(1, 0.5);
    let xs: Vec<f64> = (0..draws).map(|_| anchored.sample(&mut rng, &pctx)[0]).collect();
    let c = normal(4.0, 0.5);
    let p = ks_p(xs, |v| c.cdf(v));
    if p < 1e-3 {
        failures.push(format!("anchored rw KS p = {p:.2e}"));
    }

    let disc = DiscreteGaussian::new(1.2, 1.0).unwrap();
    let reach = disc.reach();
    let mut counts = vec![0usize; (2 * reach + 1) as usize];
    let origin = [0.0];
    let dctx = Context::single(&origin);
    for _ in 0..draws {
        let k = disc.sample(&mut rng, &dctx)[0] as i64;
        counts[(k + reach) as usize] += 1;
    }
    let (mut chi2, mut cells) = (0.0, 0usize);
    for (i, &o) in counts.iter().enumerate() {
        let e = f64::exp(disc.log_prob(i as i64 - reach)) * draws as f64;
        if e >= 5.0 {
            chi2 += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(chi2);
    if p < 1e-3 {
        failures.push(format!("discrete kernel chi-square p = {p:.2e}"));
    }
}

fn criterion_9() -> Verdict {
    let mut failures = Vec::new();
    let mut rng = RngStream::new(SEED, 9);
    let policies = [
        LambdaPolicy::plain(LambdaKind::ConstOne),
        LambdaPolicy::plain(LambdaKind::Harmonic),
        LambdaPolicy::plain(LambdaKind::PowerProduct(0.5)),
        LambdaPolicy::plain(LambdaKind::PowerProduct(1.0)),
        LambdaPolicy::plain(LambdaKind::PowerProduct(2.0)),
        LambdaPolicy::with_nu(LambdaKind::Harmonic),
    ];
    for _ in 0..1_000 {
        let a = 40.0 * (rng.random::<f64>() - 0.5);
        let b = 40.0 * (rng.random::<f64>() - 0.5);
        let nu = rng.random::<f64>();
        for p in &policies {
            let (l1, l2) = (p.log_lambda(a, b, nu).unwrap(), p.log_lambda(b, a, nu).unwrap());
            if (l1 - l2).abs() > 1e-9 * (1.0 + l1.abs()) {
                failures.push(format!("lambda {p} asymmetric at ({a}, {b})"));
            }
        }
    }

    for _ in 0..1_000 {
        let m = rng.random_range(1..6);
        let scale = [1.0, 700.0, -700.0][rng.random_range(0..3)];
        let draw = |rng: &mut RngStream| -> Vec<f64> {
            (0..m)
                .map(|_| {
                    if rng.random::<f64>() < 0.1 {
                        f64::NEG_INFINITY
                    } else {
                        scale + 5.0 * f64::standard_normal(rng)
                    }
                })
                .collect()
        };
        let (f, r) = (draw(&mut rng), draw(&mut rng));
        let rho = acceptance_ratio(&f, &r).rho;
        if !(0.0..=1.0).contains(&rho) {
            failures.push(format!("rho = {rho} for {f:?} / {r:?}"));
        }
        if f.iter().any(|w| w.is_finite()) {
            match select_trial(&mut rng, &f) {
                Ok(j) if f[j].is_finite() => {}
                other => failures.push(format!("selection {other:?} from {f:?}")),
            }
        }
    }
    let big = acceptance_ratio(&[700.0, 701.0], &[702.0, 700.0]).rho;
    let expected = ((700f64 - 702.0).exp() + (701f64 - 702.0).exp()) / (1.0 + (700f64 - 702.0).exp());
    if (big - expected).abs() > 1e-12 {
        failures.push(format!("overflow-scale ratio {big} vs {expected}"));
    }

    for _ in 0..200 {
        let slots = rng.random_range(1..8);
        let chains = rng.random_range(1..30);
        let mut nu = NuTracker::<f64>::new(slots, chains);
        for _ in 0..5 {
            let sel: Vec<Option<usize>> = (0..chains)
                .map(|_| (rng.random::<f64>() < 0.8).then(|| rng.random_range(0..slots)))
                .collect();
            nu.update(&sel);
            let s: f64 = nu.nu().iter().sum();
            if (s - 1.0).abs() > 1e-12 || nu.nu().iter().any(|&v| v < 0.0) {
                failures.push(format!("nu {:?} does not sum to 1", nu.nu()));
            }
        }
    }

    let mut cfg = SamplerConfig::new(
        Algorithm::Imtm,
        (1..=3).map(|j| Kernel::from(AnchoredRw::isotropic(2, j as f64))).collect(),
        Initialization::Overdispersed {
            center: vec![0.0, 0.0],
            scale: None,
        },
    );
    cfg.chains = 8;
    cfg.anchors = AnchorStrategy::Uniform;
    cfg.iterations = 200;
    cfg.seed = 42;
    let target = imtm::Mixture64::bimodal_2d();
    let bytes = |c: &SamplerConfig<f64>| {
        let mut buf = Vec::new();
        run(c, &target).unwrap().trace.write_csv(&mut buf).unwrap();
        buf
    };
    let first = bytes(&cfg);
    let mut serial = cfg.clone();
    serial.parallel = false;
    if first != bytes(&cfg) || first != bytes(&serial) {
        failures.push("reruns are not bit-identical".into());
    }

    kernel_fit(&mut failures);

    // Holding correctness on a single MH step.
    let mut r = RngStream::new(3, 3);
    let g = Gaussian::standard(1);
    let k = GaussianRw::isotropic(1, 1e6);
    for _ in 0..1_000 {
        let x = [0.123456789f64];
        let s = mh_step(&mut r, &x, &g, &k).unwrap();
        if !s.accepted && s.position[0].to_bits() != x[0].to_bits() {
            failures.push("rejected step moved".into());
        }
    }

    let detail = if failures.is_empty() {
        "lambda symmetry, rho range, overflow safety, nu normalization, determinism, kernel fit, holding".to_string()
    } else {
        failures.join("; ")
    };
    verdict(failures.is_empty(), detail)
}

// Long parallel-tempering reference run on the LOH posterior.

fn tempering_oracle(target: &BetaBinomialPosterior, seed: u64) -> Vec<Vec<f64>> {
    let temps = [1.0, 0.6, 0.35, 0.2, 0.1, 0.05];
    let base_sd = [0.04, 0.04, 0.04, 0.4];
    let mut rng = RngStream::new(seed, 11);
    let mut states: Vec<Vec<f64>> = (0..temps.len())
        .map(|_| vec![0.5, 0.5, 0.5, 0.0])
        .collect();
    let mut logp: Vec<f64> = states.iter().map(|s| target.log_density(s)).collect();
    let mut cold = Vec::new();
    let iterations = 300_000;
    for it in 0..iterations {
        for (r, &t) in temps.iter().enumerate() {
            let widen = 1.0 / f64::sqrt(t);
            let prop: Vec<f64> = states[r]
                .iter()
                .zip(base_sd)
                .map(|(v, s)| v + s * widen * f64::standard_normal(&mut rng))
                .collect();
            let lp = target.log_density(&prop);
            if lp > f64::NEG_INFINITY && rng.random::<f64>().ln() < t * (lp - logp[r]) {
                states[r] = prop;
                logp[r] = lp;
            }
        }
        let r = rng.random_range(0..temps.len() - 1);
        let a = (temps[r] - temps[r + 1]) * (logp[r + 1] - logp[r]);
        if rng.random::<f64>().ln() < a {
            states.swap(r, r + 1);
            logp.swap(r, r + 1);
        }
        if it >= 50_000 && it % 25 == 0 {
            cold.push(states[0][1..3].to_vec());
        }
    }
    cold
}

fn criterion_10() -> Verdict {
    let settings = betabinomial::Settings::canned(
        SEED,
        betabinomial::DataSource::Synthetic(betabinomial::Synthetic::canned()),
    );
    let target = BetaBinomialPosterior::new(settings.observations()).unwrap();
    let oracle = tempering_oracle(&target, SEED);
    let split = two_means(&oracle, 10, SEED).unwrap();
    let mid: Vec<f64> = (0..2).map(|k| 0.5 * (split.centers[0][k] + split.centers[1][k])).collect();
    let gap = ((split.centers[0][0] - split.centers[1][0]).powi(2) + (split.centers[0][1] - split.centers[1][1]).powi(2)).sqrt();
    let within = |c: &[f64]| {
        oracle
            .iter()
            .filter(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() < 0.15 * gap)
            .count()
    };
    let valley = within(&mid) as f64;
    let peaks = within(&split.centers[0]).min(within(&split.centers[1])) as f64;
    let bimodal = split.is_separated(4.0, 0.05) && valley < 0.2 * peaks;
    let oracle_text = format!(
        "oracle clusters ({:.2}, {:.2}) / ({:.2}, {:.2}) sizes {:?}, separation {:.2}, valley/peak {:.2}",
        split.centers[0][0],
        split.centers[0][1],
        split.centers[1][0],
        split.centers[1][1],
        split.sizes,
        split.separation,
        valley / peaks.max(1.0)
    );
    if !bimodal {
        return verdict(false, format!("posterior not bimodal by the oracle; {oracle_text}"));
    }
    let o = betabinomial::run(&settings).unwrap();
    let last = o.snapshots.last().unwrap();
    // Both clusters must also sit in distinct oracle modes.
    let nearest = |c: &[f64]| {
        let d = |k: usize| (c[0] - split.centers[k][0]).powi(2) + (c[1] - split.centers[k][1]).powi(2);
        usize::from(d(1) < d(0))
    };
    let distinct = nearest(&last.split.centers[0]) != nearest(&last.split.centers[1]);
    verdict(
        last.split.is_separated(4.0, 0.05) && distinct,
        format!(
            "IMTM final population clusters ({:.2}, {:.2}) / ({:.2}, {:.2}) sizes {:?}, separation {:.2}; {oracle_text}",
            last.split.centers[0][0],
            last.split.centers[0][1],
            last.split.centers[1][0],
            last.split.centers[1][1],
            last.split.sizes,
            last.split.separation
        ),
    )
}

fn main() {
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.trim_start_matches('c').parse().ok())
        .collect();
    let wanted = |c: u32| filter.is_empty() || filter.contains(&c);
    let budgets: [(u32, u64); 10] = [
        (1, 120),
        (2, 60),
        (3, 300),
        (4, 900),
        (5, 300),
        (6, 300),
        (7, 120),
        (8, 1800),
        (9, 300),
        (10, 600),
    ];
    let mut results: Vec<(u32, Verdict, Duration)> = Vec::new();
    let timed = |f: &dyn Fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        (v, t.elapsed())
    };
    for c in [1u32, 2, 3, 4, 7, 8, 9, 10] {
        if !wanted(c) {
            continue;
        }
        let (v, d) = timed(&|| match c {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            7 => criterion_7(),
            8 => criterion_8(),
            9 => criterion_9(),
            _ => criterion_10(),
        });
        results.push((c, v, d));
        if c == 4 && (wanted(5) || wanted(6)) {
            let t = Instant::now();
            let (v5, v6) = criteria_5_6();
            let d = t.elapsed();
            results.push((5, v5, d));
            results.push((6, v6, d));
        }
    }
    if filter.iter().any(|&c| c == 5 || c == 6) && !wanted(4) {
        let t = Instant::now();
        let (v5, v6) = criteria_5_6();
        let d = t.elapsed();
        if wanted(5) {
            results.push((5, v5, d));
        }
        if wanted(6) {
            results.push((6, v6, d));
        }
    }
    results.sort_by_key(|r| r.0);

    let mut unexpected = Vec::new();
    println!();
    for (c, v, d) in &results {
        let budget = budgets.iter().find(|b| b.0 == *c).map(|b| b.1).unwrap_or(0);
        let in_budget = d.as_secs() <= budget;
        let passed = v.passed && in_budget;
        let expected_fail = EXPECTED_FAILURES.contains(c);
        let tag = match (passed, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        if passed == expected_fail {
            unexpected.push(*c);
        }
        let time = if in_budget { String::new() } else { format!(" [over budget {budget}s]") };
        println!("criterion {c:>2}: {tag:<18} {:>7.1}s{time}  {}", d.as_secs_f64(), v.detail);
    }
    println!();
    if !unexpected.is_empty() {
        println!("acceptance: outcome differs from expectation for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: all outcomes as expected");
}

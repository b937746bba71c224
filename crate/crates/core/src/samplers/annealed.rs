use rayon::prelude::*;

use super::population::imtm_step_with;
use super::{mh_step, mtm_transition, PopulationConfig, PopulationState, Step, TrialSlot};
use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{Context, Kernel};
use crate::real::Real;
use crate::targets::{Target, Tempered};
use crate::weights::{Counters, NuTracker};

/// Exponents `1 = ξ_1 > ξ_2 > … > ξ_N > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TemperatureLadder<T> {
    exponents: Vec<T>,
}

impl<T: Real> TemperatureLadder<T> {
    pub fn new(exponents: Vec<T>) -> Result<Self> {
        if exponents.first() != Some(&T::one()) {
            return Err(Error::InvalidParameter("ladder must start at exponent 1".into()));
        }
        if exponents.windows(2).any(|w| !(w[1] < w[0])) || exponents.iter().any(|&e| !(e > T::zero())) {
            return Err(Error::InvalidParameter(
                "ladder exponents must be positive and strictly decreasing".into(),
            ));
        }
        Ok(Self { exponents })
    }

    /// All exponents 1. Not a proper ladder: the annealed samplers then
    /// reduce to their untempered counterparts.
    pub fn flat(n: usize) -> Self {
        Self {
            exponents: vec![T::one(); n],
        }
    }

    /// `ξ_t = 1/t`.
    pub fn harmonic(n: usize) -> Self {
        Self {
            exponents: (1..=n).map(|t| T::one() / T::from_count(t)).collect(),
        }
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    fn check(&self, chains: usize) -> Result<()> {
        if self.len() == chains {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: chains,
                found: self.len(),
            })
        }
    }

    fn tempered<'a, G: Target<T> + ?Sized>(&self, base: &'a G) -> Vec<Tempered<&'a G, T>> {
        self.exponents
            .iter()
            .map(|&e| Tempered::new(base, e).expect("validated ladder"))
            .collect()
    }
}

/// Annealed population step: chain `i` runs a multiple-try update on
/// `π^{ξ_i}`. Use [`super::AnchorStrategy::Ladder`] for the anchor pattern
/// in which chain `i` borrows from chains `1..=N-i+1`.
pub fn aimtm1_step<T: Real, G: Target<T> + ?Sized>(
    pop: &mut PopulationState<T>,
    base: &G,
    ladder: &TemperatureLadder<T>,
    cfg: &PopulationConfig<T>,
    rngs: &mut [RngStream],
    nu: &mut NuTracker<T>,
) -> Result<Counters> {
    ladder.check(pop.chains())?;
    let targets = ladder.tempered(base);
    imtm_step_with(pop, |i| &targets[i], cfg, rngs, nu)
}

/// Annealed step with Metropolis auxiliaries: chains `2..N` run MH on
/// `π^{ξ_i}` with `aux[i-2]`; chain 1 runs a multiple-try update on `π`
/// with `cfg.kernels[j]` anchored at chain `j+2` (1-based).
pub fn aimtm2_step<T: Real, G: Target<T> + ?Sized>(
    pop: &mut PopulationState<T>,
    base: &G,
    ladder: &TemperatureLadder<T>,
    cfg: &PopulationConfig<T>,
    aux: &[Kernel<T>],
    rngs: &mut [RngStream],
    nu: &mut NuTracker<T>,
) -> Result<Counters> {
    let n = pop.chains();
    ladder.check(n)?;
    if n < 2 || cfg.kernels.len() != n - 1 || aux.len() != n - 1 {
        return Err(Error::InvalidParameter(format!(
            "annealed MH auxiliaries need N >= 2 with N-1 cold kernels and N-1 auxiliary kernels (N = {n})"
        )));
    }
    let targets = ladder.tempered(base);
    let snapshot = &pop.positions;
    let weights = nu.nu().to_vec();
    let run = |(i, rng): (usize, &mut RngStream)| -> Result<Step<T>> {
        if i == 0 {
            let slots: Vec<TrialSlot<'_, Kernel<T>, T>> = cfg
                .kernels
                .iter()
                .enumerate()
                .map(|(j, kernel)| TrialSlot {
                    kernel,
                    anchor: Some(j + 1),
                    nu: weights.get(j).copied().unwrap_or(T::one()),
                })
                .collect();
            let ctx = Context::population(&snapshot[0], snapshot, 0);
            mtm_transition(rng, base, &cfg.policy, &ctx, &slots)
        } else {
            mh_step(rng, &snapshot[i], &targets[i], &aux[i - 1])
        }
    };
    let steps: Vec<Step<T>> = if cfg.parallel {
        rngs.par_iter_mut().enumerate().map(run).collect::<Result<_>>()?
    } else {
        rngs.iter_mut().enumerate().map(run).collect::<Result<_>>()?
    };
    let counters = pop.record(steps);
    nu.update(&pop.selected[..1]);
    Ok(counters)
}

/// Result of the tempered-population estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealEstimate<T> {
    pub value: T,
    pub iterations: usize,
    /// Iterations dropped because every importance weight was zero.
    pub skipped: usize,
}

/// `I = (1/T) Σ_n Σ_j h(x_n^{(j)}) ζ_j(x_n^{(j)}) / Σ_j ζ_j(x_n^{(j)})` with
/// `ζ_j(x) = π(x)^{1-ξ_j}`, normalized within each iteration.
///
/// `traces[j][n]` is rung `j`'s draw at iteration `n`.
pub fn anneal_estimate<T, G, H>(
    target: &G,
    ladder: &TemperatureLadder<T>,
    traces: &[Vec<Vec<T>>],
    h: H,
) -> Result<AnnealEstimate<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    H: Fn(&[T]) -> T,
{
    ladder.check(traces.len())?;
    let len = traces[0].len();
    if let Some(t) = traces.iter().find(|t| t.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: t.len(),
        });
    }
    let mut total = T::zero();
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut log_zeta = vec![T::zero(); traces.len()];
    for n in 0..len {
        for (j, (trace, &xi)) in traces.iter().zip(ladder.exponents()).enumerate() {
            let lp = target.log_density(&trace[n]);
            log_zeta[j] = if xi == T::one() && lp.is_finite() {
                T::zero()
            } else {
                (T::one() - xi) * lp
            };
        }
        let top = log_zeta.iter().copied().fold(T::neg_infinity(), T::max);
        if !top.is_finite() {
            skipped += 1;
            continue;
        }
        // Same summation order for numerator and normalizer, so h ≡ 1
        // gives exactly 1.
        let mut acc = T::zero();
        let mut norm = T::zero();
        for (j, trace) in traces.iter().enumerate() {
            let w = (log_zeta[j] - top).exp();
            if w > T::zero() {
                acc += w * h(&trace[n]);
                norm += w;
            }
        }
        let acc = acc / norm;
        total += acc;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientData(
            "no iteration had a positive importance weight".into(),
        ));
    }
    Ok(AnnealEstimate {
        value: total / T::from_count(used),
        iterations: used,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::Gaussian;

    #[test]
    fn ladder_validation() {
        assert!(TemperatureLadder::new(vec![1.0, 0.5, 0.25]).is_ok());
        assert!(TemperatureLadder::new(vec![0.9, 0.5]).is_err());
        assert!(TemperatureLadder::new(vec![1.0, 0.5, 0.5]).is_err());
        assert!(TemperatureLadder::new(vec![1.0, 0.0]).is_err());
        let h = TemperatureLadder::<f64>::harmonic(4);
        assert_eq!(h.exponents(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn single_rung_is_ergodic_average() {
        let t = Gaussian::<f64>::standard(1);
        let ladder = TemperatureLadder::new(vec![1.0]).unwrap();
        let trace = vec![vec![vec![1.0], vec![2.0], vec![6.0]]];
        let e = anneal_estimate(&t, &ladder, &trace, |x| x[0]).unwrap();
        assert!((e.value - 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_function_gives_one() {
        let t = Gaussian::<f64>::standard(1);
        let ladder = TemperatureLadder::new(vec![1.0, 0.5, 0.25]).unwrap();
        let mut rng = RngStream::new(3, 0);
        let traces: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|_| (0..100).map(|_| vec![3.0 * f64::standard_normal(&mut rng)]).collect())
            .collect();
        let e = anneal_estimate(&t, &ladder, &traces, |_| 1.0).unwrap();
        assert_eq!(e.value, 1.0);
    }
}

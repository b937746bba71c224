//! Selection weights, λ policies, trial selection and the generalized
//! acceptance ratio. Everything is carried in log space.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mathcore::RngStream;
use crate::proposals::{Context, Proposal};
use crate::real::{log_sum_exp, Real};
use crate::targets::Target;

/// Base form of the symmetric factor `λ(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaKind {
    /// `λ = 1`
    ConstOne,
    /// `λ = 2 / (T(x,y) + T(y,x))`
    Harmonic,
    /// `λ = (T(x,y)·T(y,x))^{-α}`
    PowerProduct(f64),
}

/// A λ family, optionally multiplied by the slot's population factor `ν_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaPolicy {
    pub kind: LambdaKind,
    pub nu_weighted: bool,
}

impl LambdaPolicy {
    pub const fn plain(kind: LambdaKind) -> Self {
        Self {
            kind,
            nu_weighted: false,
        }
    }

    pub const fn with_nu(kind: LambdaKind) -> Self {
        Self {
            kind,
            nu_weighted: true,
        }
    }

    /// `λ = 1/(T(x,y)T(y,x))`, which yields importance weights `π(y)/T(y|x)`.
    pub const fn importance() -> Self {
        Self::plain(LambdaKind::PowerProduct(1.0))
    }

    /// Whether the forward density `T(y|x)` is needed at all.
    pub fn needs_forward_density(&self) -> bool {
        !matches!(self.kind, LambdaKind::ConstOne)
    }

    /// `log λ` from log kernel densities; `Err(DegenerateWeight)` on a zero
    /// denominator.
    pub fn log_lambda<T: Real>(&self, log_t_xy: T, log_t_yx: T, nu: T) -> Result<T> {
        let base = match self.kind {
            LambdaKind::ConstOne => T::zero(),
            LambdaKind::Harmonic => {
                let denom = crate::real::log_add_exp(log_t_xy, log_t_yx);
                if denom == T::neg_infinity() {
                    return Err(Error::DegenerateWeight);
                }
                T::LN_2() - denom
            }
            LambdaKind::PowerProduct(alpha) => {
                if log_t_xy == T::neg_infinity() || log_t_yx == T::neg_infinity() {
                    return Err(Error::DegenerateWeight);
                }
                -T::of(alpha) * (log_t_xy + log_t_yx)
            }
        };
        Ok(if self.nu_weighted { base + nu.ln() } else { base })
    }
}

/// `λ` on the natural scale.
pub fn lambda_value<T: Real>(policy: &LambdaPolicy, t_xy: T, t_yx: T, nu: T) -> Result<T> {
    if t_xy < T::zero() || t_yx < T::zero() {
        return Err(Error::InvalidParameter(
            "kernel densities must be nonnegative".into(),
        ));
    }
    policy.log_lambda(t_xy.ln(), t_yx.ln(), nu).map(T::exp)
}

impl fmt::Display for LambdaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nu = if self.nu_weighted { "-nu" } else { "" };
        match self.kind {
            LambdaKind::ConstOne => write!(f, "one{nu}"),
            LambdaKind::Harmonic => write!(f, "harmonic{nu}"),
            LambdaKind::PowerProduct(a) => write!(f, "power{nu}({a})"),
        }
    }
}

/// Parses `one`, `harmonic`, `power(α)`, each optionally with a `-nu`
/// suffix on the name (e.g. `power-nu(1)`).
impl FromStr for LambdaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Configuration(format!("unknown lambda policy `{s}`"));
        let (name, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(bad()),
            None => (s, None),
        };
        let (name, nu_weighted) = match name.strip_suffix("-nu") {
            Some(n) => (n, true),
            None => (name, false),
        };
        let kind = match (name, arg) {
            ("one", None) => LambdaKind::ConstOne,
            ("harmonic", None) => LambdaKind::Harmonic,
            ("power", None) => LambdaKind::PowerProduct(1.0),
            ("power", Some(a)) => {
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Configuration(format!(
                        "lambda exponent must be positive, got {a}"
                    )));
                }
                LambdaKind::PowerProduct(a)
            }
            _ => return Err(bad()),
        };
        Ok(Self { kind, nu_weighted })
    }
}

/// A log-weight; `log == -inf` is an exact zero weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight<T> {
    pub log: T,
    /// λ had a zero denominator and the weight was forced to zero.
    pub degenerate: bool,
}

impl<T: Real> Weight<T> {
    pub fn zero() -> Self {
        Self {
            log: T::neg_infinity(),
            degenerate: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log == T::neg_infinity()
    }
}

/// `log w(y, x) = log π(y) + log T(x | y) + log λ(x, y)` where `from`
/// supplies `x` (as `from.current`) and the rest of the conditioning.
///
/// Off-support points get weight zero. Kernel errors (e.g. off-ray points)
/// propagate.
pub fn trial_weight<T, G, K>(
    target: &G,
    kernel: &K,
    policy: &LambdaPolicy,
    y: &[T],
    from: &Context<'_, T>,
    nu: T,
) -> Result<Weight<T>>
where
    T: Real,
    G: Target<T> + ?Sized,
    K: Proposal<T> + ?Sized,
{
    if !target.in_support(y) {
        return Ok(Weight::zero());
    }
    let log_pi = target.log_density(y);
    if !(log_pi > T::neg_infinity()) {
        return Ok(Weight::zero());
    }
    let log_t_yx = kernel.log_density(from.current, &from.with_current(y))?;
    let log_t_xy = if policy.needs_forward_density() {
        kernel.log_density(y, from)?
    } else {
        T::zero()
    };
    match policy.log_lambda(log_t_xy, log_t_yx, nu) {
        Ok(ll) => {
            let log = log_pi + log_t_yx + ll;
            Ok(Weight {
                log: if log.is_nan() { T::neg_infinity() } else { log },
                degenerate: false,
            })
        }
        Err(Error::DegenerateWeight) => Ok(Weight {
            log: T::neg_infinity(),
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Draws `J` with probability proportional to `exp(log_weights[J])` by
/// inverting the cumulative sum at a single uniform.
pub fn select_trial<T: Real>(rng: &mut RngStream, log_weights: &[T]) -> Result<usize> {
    let max = log_weights
        .iter()
        .copied()
        .fold(T::neg_infinity(), T::max);
    if !(max > T::neg_infinity()) || !max.is_finite() {
        return Err(Error::StuckTrials);
    }
    let scaled: Vec<T> = log_weights.iter().map(|&lw| (lw - max).exp()).collect();
    let total: T = scaled.iter().copied().sum();
    let u = T::open_unit(rng) * total;
    let mut acc = T::zero();
    let mut last = 0;
    for (j, &w) in scaled.iter().enumerate() {
        if w > T::zero() {
            acc += w;
            last = j;
            if u < acc {
                return Ok(j);
            }
        }
    }
    Ok(last)
}

/// Generalized acceptance probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Acceptance<T> {
    pub rho: T,
    /// Reference sum was zero while the forward sum was not.
    pub degenerate: bool,
}

/// `ρ = min(1, Σ forward / Σ reference)` via paired log-sum-exp.
pub fn acceptance_ratio<T: Real>(forward: &[T], reference: &[T]) -> Acceptance<T> {
    let f = log_sum_exp(forward);
    let r = log_sum_exp(reference);
    if f == T::neg_infinity() || f.is_nan() {
        return Acceptance {
            rho: T::zero(),
            degenerate: false,
        };
    }
    if r == T::neg_infinity() {
        return Acceptance {
            rho: T::one(),
            degenerate: true,
        };
    }
    let log_rho = f - r;
    Acceptance {
        rho: if log_rho >= T::zero() { T::one() } else { log_rho.exp() },
        degenerate: false,
    }
}

/// `ν_j = #{chains that selected slot j} / N`; `selections` are 0-based.
pub fn update_nu<T: Real>(selections: &[usize], slots: usize) -> Vec<T> {
    let mut counts = vec![0usize; slots];
    for &j in selections {
        counts[j] += 1;
    }
    let n = T::from_count(selections.len().max(1));
    counts.into_iter().map(|c| T::from_count(c) / n).collect()
}

/// Population slot-usage frequencies from the previous iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct NuTracker<T> {
    slots: usize,
    chains: usize,
    nu: Vec<T>,
}

impl<T: Real> NuTracker<T> {
    /// Starts uniform over slots, before any selection has been seen.
    pub fn new(slots: usize, chains: usize) -> Self {
        Self {
            slots,
            chains,
            nu: vec![T::one() / T::from_count(slots.max(1)); slots],
        }
    }

    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    /// Replaces `ν` with the frequencies of this iteration's selections.
    /// Chains that made no selection (all weights zero) are left out; if
    /// none selected anything the previous `ν` is kept.
    pub fn update(&mut self, selections: &[Option<usize>]) {
        let picked: Vec<usize> = selections
            .iter()
            .flatten()
            .copied()
            .filter(|&j| j < self.slots)
            .collect();
        if !picked.is_empty() {
            self.nu = update_nu(&picked, self.slots);
        }
    }
}

/// Everything one MTM transition produced.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialSet<T> {
    pub trials: Vec<Vec<T>>,
    pub forward: Vec<T>,
    pub selected: Option<usize>,
    /// `x*_j`, with `x*_J` equal to the pre-move point.
    pub references: Vec<Vec<T>>,
    pub reference: Vec<T>,
}

/// Counts of numerically degenerate events, accumulated over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub stuck: u64,
    pub degenerate_weights: u64,
    pub degenerate_ratios: u64,
    pub degenerate_directions: u64,
    pub overflows: u64,
}

impl Counters {
    pub fn merge(&mut self, other: &Counters) {
        self.stuck += other.stuck;
        self.degenerate_weights += other.degenerate_weights;
        self.degenerate_ratios += other.degenerate_ratios;
        self.degenerate_directions += other.degenerate_directions;
        self.overflows += other.overflows;
    }
}

use std::path::Path;

use super::Target;
use crate::error::{Error, Result};
use crate::real::{log_add_exp, Real};

/// One LOH record: `x` losses among `n` examined sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LohObservation {
    pub x: u32,
    pub n: u32,
}

/// Posterior of the binomial / beta-binomial LOH mixture under flat priors.
///
/// Parameters are ordered `(η, π₁, π₂, γ)` on `[0,1]³ × [-30,30]`; the
/// beta-binomial overdispersion is `ω₂ = e^γ / (2(1 + e^γ))`.
#[derive(Clone, Debug)]
pub struct BetaBinomialPosterior {
    obs: Vec<LohObservation>,
    log_choose: Vec<f64>,
}

pub const GAMMA_BOUND: f64 = 30.0;

fn xlogy<T: Real>(x: T, y: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x * y.ln()
    }
}

impl BetaBinomialPosterior {
    pub fn new(obs: Vec<LohObservation>) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::InsufficientData("no LOH observations".into()));
        }
        if let Some(o) = obs.iter().find(|o| o.x > o.n) {
            return Err(Error::InvalidParameter(format!(
                "observation x = {} exceeds n = {}",
                o.x, o.n
            )));
        }
        let log_choose = obs
            .iter()
            .map(|o| {
                let (x, n) = (o.x as f64, o.n as f64);
                statrs::function::gamma::ln_gamma(n + 1.0)
                    - statrs::function::gamma::ln_gamma(x + 1.0)
                    - statrs::function::gamma::ln_gamma(n - x + 1.0)
            })
            .collect();
        Ok(Self { obs, log_choose })
    }

    pub fn observations(&self) -> &[LohObservation] {
        &self.obs
    }

    pub fn omega2<T: Real>(gamma: T) -> T {
        // e^γ / (2(1+e^γ)) = logistic(γ) / 2
        T::of(0.5) / (T::one() + (-gamma).exp())
    }

    pub fn in_box<T: Real>(p: &[T]) -> bool {
        p.len() == 4
            && p[..3].iter().all(|&v| v >= T::zero() && v <= T::one())
            && p[3].abs() <= T::of(GAMMA_BOUND)
    }

    /// Log-posterior (up to a constant); `-inf` outside the prior box.
    ///
    /// Fails with [`Error::InvalidParameter`] when a log-gamma argument is
    /// non-positive, which happens on the `π₂ ∈ {0, 1}` faces.
    pub fn try_log_posterior<T: Real>(&self, p: &[T]) -> Result<T> {
        if !Self::in_box(p) {
            return Ok(T::neg_infinity());
        }
        let (eta, p1, p2, gamma) = (p[0], p[1], p[2], p[3]);
        let omega = Self::omega2(gamma);
        let a = p2 / omega;
        let b = (T::one() - p2) / omega;
        let inv = T::one() / omega;
        let mixed = eta < T::one();
        if mixed && !(a > T::zero() && b > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta-binomial shape parameters ({a}, {b}) must be positive"
            )));
        }
        let bb_const = if mixed {
            inv.lgamma() - a.lgamma() - b.lgamma()
        } else {
            T::zero()
        };
        let ln_eta = eta.ln();
        let ln_1m_eta = (T::one() - eta).ln();
        let mut total = T::zero();
        for (o, &lc) in self.obs.iter().zip(&self.log_choose) {
            let x = T::from_u32(o.x).expect("u32");
            let n = T::from_u32(o.n).expect("u32");
            let lc = T::of(lc);
            let binom = if eta > T::zero() {
                ln_eta + lc + xlogy(x, p1) + xlogy(n - x, T::one() - p1)
            } else {
                T::neg_infinity()
            };
            let beta_binom = if mixed {
                ln_1m_eta + lc + bb_const + (x + a).lgamma() + (n - x + b).lgamma()
                    - (n + inv).lgamma()
            } else {
                T::neg_infinity()
            };
            let term = log_add_exp(binom, beta_binom);
            if term.is_nan() {
                return Err(Error::InvalidParameter(
                    "log-gamma evaluated at a non-positive argument".into(),
                ));
            }
            total += term;
        }
        Ok(total)
    }

    /// Simulates `m` observations from the model; `n_range` bounds the
    /// examined-section counts (inclusive).
    pub fn simulate<R: rand::Rng + ?Sized>(
        rng: &mut R,
        m: usize,
        n_range: (u32, u32),
        params: [f64; 4],
    ) -> Vec<LohObservation> {
        let [eta, p1, p2, gamma] = params;
        let omega = Self::omega2(gamma);
        let a = p2 / omega;
        let b = (1.0 - p2) / omega;
        (0..m)
            .map(|_| {
                let n = rng.random_range(n_range.0..=n_range.1);
                let p = if f64::open_unit(rng) < eta {
                    p1
                } else {
                    let ga = f64::sample_gamma(rng, a, 1.0);
                    let gb = f64::sample_gamma(rng, b, 1.0);
                    ga / (ga + gb)
                };
                let x = (0..n).filter(|_| f64::open_unit(rng) < p).count() as u32;
                LohObservation { x, n }
            })
            .collect()
    }
}

impl<T: Real> Target<T> for BetaBinomialPosterior {
    fn dim(&self) -> usize {
        4
    }

    fn log_density(&self, x: &[T]) -> T {
        self.try_log_posterior(x).unwrap_or(T::neg_infinity())
    }

    fn in_support(&self, x: &[T]) -> bool {
        Self::in_box(x) && self.log_density(x) > T::neg_infinity()
    }
}

/// Reads LOH data from a CSV with header `x,n`.
pub fn read_loh_csv(path: impl AsRef<Path>) -> Result<Vec<LohObservation>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "n" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `x,n`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let parse = |s: &str| {
            s.parse::<u32>().map_err(|e| Error::Parse {
                line,
                message: format!("`{s}`: {e}"),
            })
        };
        let x = parse(&rec[0])?;
        let n = parse(&rec[1])?;
        if x > n {
            return Err(Error::Parse {
                line,
                message: format!("x = {x} exceeds n = {n}"),
            });
        }
        out.push(LohObservation { x, n });
    }
    Ok(out)
}

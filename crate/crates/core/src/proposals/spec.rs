use std::fmt;
use std::str::FromStr;

use super::{AnchoredRw, DiscreteGaussian, GaussianRw, Kernel, MixtureRw};
use crate::error::{Error, Result};
use crate::mathcore::SpdMatrix;
use crate::real::Real;

/// Serializable kernel descriptor, written `kind(p1,p2,...)`.
///
/// * `rw(v)` / `rw(v1,..,vd)`: random walk, isotropic or diagonal variance
/// * `anchored(v)` / `anchored(v1,..,vd)`: same, centred at the anchor
/// * `mix(v1,..,vk)`: equal-weight isotropic random-walk mixture
/// * `discrete(s)` / `discrete(s,shift)`: integer-lattice kernel
#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    Rw(Vec<f64>),
    Anchored(Vec<f64>),
    Mixture(Vec<f64>),
    Discrete { scale: f64, shift: f64 },
}

fn covariance<T: Real>(variances: &[f64], dim: usize) -> Result<SpdMatrix<T>> {
    let diag: Vec<T> = match variances.len() {
        1 => vec![T::of(variances[0]); dim],
        n if n == dim => variances.iter().map(|&v| T::of(v)).collect(),
        n => {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: n,
            })
        }
    };
    SpdMatrix::diagonal(&diag)
}

impl KernelSpec {
    pub fn build<T: Real>(&self, dim: usize) -> Result<Kernel<T>> {
        Ok(match self {
            KernelSpec::Rw(v) => GaussianRw::new(covariance(v, dim)?).into(),
            KernelSpec::Anchored(v) => AnchoredRw::new(covariance(v, dim)?).into(),
            KernelSpec::Mixture(v) => {
                let covs = v
                    .iter()
                    .map(|&s| covariance(&[s], dim))
                    .collect::<Result<Vec<_>>>()?;
                let w = T::one() / T::from_count(v.len());
                MixtureRw::new(vec![w; v.len()], covs)?.into()
            }
            KernelSpec::Discrete { scale, shift } => {
                DiscreteGaussian::new(T::of(*scale), T::of(*shift))?.into()
            }
        })
    }

    /// Largest standard deviation the kernel moves by, used to size
    /// overdispersed starting points.
    pub fn max_scale(&self) -> f64 {
        match self {
            KernelSpec::Rw(v) | KernelSpec::Anchored(v) | KernelSpec::Mixture(v) => {
                v.iter().fold(0.0f64, |m, &s| m.max(s)).sqrt()
            }
            KernelSpec::Discrete { scale, shift } => scale + shift.abs(),
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Rw(v) => write!(f, "rw({})", join(v)),
            KernelSpec::Anchored(v) => write!(f, "anchored({})", join(v)),
            KernelSpec::Mixture(v) => write!(f, "mix({})", join(v)),
            KernelSpec::Discrete { scale, shift } => write!(f, "discrete({scale},{shift})"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Configuration(format!("kernel `{s}`: {msg}"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| bad("expected kind(params)"))?;
        if !s.ends_with(')') {
            return Err(bad("missing closing parenthesis"));
        }
        let kind = s[..open].trim();
        let params: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("parameters must be numbers"))?;
        let positive = |v: &[f64]| v.iter().all(|&x| x > 0.0 && x.is_finite());
        match kind {
            "rw" | "anchored" | "mix" => {
                if !positive(&params) {
                    return Err(bad("variances must be positive"));
                }
                Ok(match kind {
                    "rw" => KernelSpec::Rw(params),
                    "anchored" => KernelSpec::Anchored(params),
                    _ => KernelSpec::Mixture(params),
                })
            }
            "discrete" => match params[..] {
                [scale] if scale > 0.0 => Ok(KernelSpec::Discrete { scale, shift: 0.0 }),
                [scale, shift] if scale > 0.0 && shift.is_finite() => {
                    Ok(KernelSpec::Discrete { scale, shift })
                }
                _ => Err(bad("expected discrete(scale[,shift]) with scale > 0")),
            },
            _ => Err(bad("unknown kind (rw, anchored, mix, discrete)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in ["rw(0.1)", "rw(0.5,0.1)", "anchored(5.1)", "mix(0.1,5,50,100)", "discrete(1.2,1)"] {
            let k: KernelSpec = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
            assert_eq!(k.to_string().parse::<KernelSpec>().unwrap(), k);
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["rw", "rw(-1)", "foo(1)", "rw(a)", "discrete(0)"] {
            assert!(s.parse::<KernelSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn builds_kernels() {
        let k: Kernel<f64> = KernelSpec::Anchored(vec![5.1]).build(2).unwrap();
        assert!(k.is_anchored());
        assert!(KernelSpec::Rw(vec![1.0, 2.0, 3.0]).build::<f64>(2).is_err());
    }
}

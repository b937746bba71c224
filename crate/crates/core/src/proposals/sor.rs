use super::{Context, Proposal};
use crate::error::{Error, Result};
use crate::mathcore::{cholesky, mvn_logpdf_unchecked, mvn_sample_unchecked, Matrix, RngStream, SpdMatrix};
use crate::real::Real;

/// Reference point the overrelaxation construction is centred on.
#[derive(Clone, Debug, PartialEq)]
pub enum SorCenter<T> {
    Fixed(Vec<T>),
    /// Mean of the other chains in the frozen snapshot.
    PopulationMean,
}

impl<T: Real> SorCenter<T> {
    fn resolve(&self, ctx: &Context<'_, T>) -> Vec<T> {
        match self {
            SorCenter::Fixed(c) => c.clone(),
            SorCenter::PopulationMean => ctx.others_mean(),
        }
    }
}

fn symmetrize<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let t = m.transpose();
    m.add(&t).expect("square").scale(T::of(0.5))
}

/// Joint Gaussian over `M-1` trial deviations and the current deviation,
/// with trial/current cross-covariances `Ψ_iM = L_i R_iM L_Mᵀ` and
/// uncorrelated trials.
#[derive(Clone, Debug)]
pub struct SorBlock<T> {
    sigmas: Vec<SpdMatrix<T>>,
    psis: Vec<Matrix<T>>,
    center: SorCenter<T>,
    /// `Ψ_iM Σ_M⁻¹` for each trial.
    gains: Vec<Matrix<T>>,
    /// Joint conditional covariance of all trials given the current point.
    joint: SpdMatrix<T>,
}

/// Default componentwise correlation keeping `V` positive definite for
/// `trials` correlated trials.
pub fn default_correlation<T: Real>(trials: usize) -> T {
    -T::of(0.9) / T::from_count(trials.max(1)).sqrt()
}

impl<T: Real> SorBlock<T> {
    /// `sigmas` holds `Σ_1..Σ_M` (the last one belongs to the current
    /// point); `correlations` holds `R_1M..R_{M-1,M}`.
    pub fn new(
        sigmas: Vec<SpdMatrix<T>>,
        correlations: Vec<Matrix<T>>,
        center: SorCenter<T>,
    ) -> Result<Self> {
        let m = sigmas.len();
        if m < 2 || correlations.len() != m - 1 {
            return Err(Error::InvalidParameter(format!(
                "SOR block needs M >= 2 covariances and M-1 correlation matrices, got {} and {}",
                m,
                correlations.len()
            )));
        }
        let d = sigmas[0].dim();
        for s in &sigmas {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
        }
        for r in &correlations {
            if r.rows() != d || r.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: r.rows().max(r.cols()),
                });
            }
        }
        if let SorCenter::Fixed(c) = &center {
            if c.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.len(),
                });
            }
        }
        let sigma_m = &sigmas[m - 1];
        let lm_t = sigma_m.cholesky().transpose();
        let psis: Vec<Matrix<T>> = correlations
            .iter()
            .zip(&sigmas)
            .map(|(r, s)| s.cholesky().matmul(r)?.matmul(&lm_t))
            .collect::<Result<_>>()?;

        let max_corr = correlations
            .iter()
            .map(|r| r.max_abs())
            .fold(T::zero(), T::max);
        let not_spd = || {
            Error::InvalidParameter(format!(
                "SOR joint covariance is not positive definite (max |R| = {max_corr})"
            ))
        };

        // Full V, checked directly.
        let n = m * d;
        let mut v = Matrix::zeros(n, n);
        for (i, s) in sigmas.iter().enumerate() {
            for a in 0..d {
                for b in 0..d {
                    v[(i * d + a, i * d + b)] = s.matrix()[(a, b)];
                }
            }
        }
        for (i, psi) in psis.iter().enumerate() {
            for a in 0..d {
                for b in 0..d {
                    v[(i * d + a, (m - 1) * d + b)] = psi[(a, b)];
                    v[((m - 1) * d + b, i * d + a)] = psi[(a, b)];
                }
            }
        }
        cholesky(&v).map_err(|_| not_spd())?;

        let sm_inv = sigma_m.inverse();
        let gains: Vec<Matrix<T>> = psis
            .iter()
            .map(|p| p.matmul(&sm_inv))
            .collect::<Result<_>>()?;
        let k = m - 1;
        let mut cond = Matrix::zeros(k * d, k * d);
        for i in 0..k {
            for j in 0..k {
                let reduction = gains[i].matmul(&psis[j].transpose())?;
                for a in 0..d {
                    for b in 0..d {
                        let base = if i == j { sigmas[i].matrix()[(a, b)] } else { T::zero() };
                        cond[(i * d + a, j * d + b)] = base - reduction[(a, b)];
                    }
                }
            }
        }
        let joint = SpdMatrix::new(symmetrize(&cond)).map_err(|_| not_spd())?;
        Ok(Self {
            sigmas,
            psis,
            center,
            gains,
            joint,
        })
    }

    /// Every trial gets the same `R_iM = rho·I`.
    pub fn uniform(sigmas: Vec<SpdMatrix<T>>, rho: T, center: SorCenter<T>) -> Result<Self> {
        let d = sigmas.first().map_or(0, SpdMatrix::dim);
        let r = Matrix::identity(d).scale(rho);
        let k = sigmas.len().saturating_sub(1);
        Self::new(sigmas, vec![r; k], center)
    }

    pub fn dim(&self) -> usize {
        self.sigmas[0].dim()
    }

    pub fn trials(&self) -> usize {
        self.sigmas.len() - 1
    }

    pub fn psi(&self, i: usize) -> &Matrix<T> {
        &self.psis[i]
    }

    pub fn center(&self) -> &SorCenter<T> {
        &self.center
    }

    fn conditional_means(&self, ctx: &Context<'_, T>) -> Vec<T> {
        let c = self.center.resolve(ctx);
        let dev: Vec<T> = ctx.current.iter().zip(&c).map(|(&x, &ci)| x - ci).collect();
        let mut out = Vec::with_capacity(self.trials() * self.dim());
        for g in &self.gains {
            let shift = g.mul_vec(&dev).expect("dimension checked");
            out.extend(c.iter().zip(shift).map(|(&ci, s)| ci + s));
        }
        out
    }

    /// Draws all `M-1` trials jointly from their conditional law given the
    /// current point.
    pub fn sample_block(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<Vec<T>> {
        let mean = self.conditional_means(ctx);
        let flat = mvn_sample_unchecked(rng, &mean, &self.joint);
        flat.chunks(self.dim()).map(<[T]>::to_vec).collect()
    }

    /// Per-trial marginal conditional kernels, used as `T_j` in the weights.
    pub fn trial_kernels(&self) -> Result<Vec<SorTrial<T>>> {
        self.gains
            .iter()
            .zip(&self.psis)
            .zip(&self.sigmas)
            .map(|((g, p), s)| {
                let cov = s.matrix().sub(&g.matmul(&p.transpose())?)?;
                Ok(SorTrial {
                    gain: g.clone(),
                    cov: SpdMatrix::new(symmetrize(&cov))?,
                    center: self.center.clone(),
                })
            })
            .collect()
    }
}

/// One trial's conditional kernel `N(c + G(x - c), S)`.
#[derive(Clone, Debug)]
pub struct SorTrial<T> {
    gain: Matrix<T>,
    cov: SpdMatrix<T>,
    center: SorCenter<T>,
}

impl<T: Real> SorTrial<T> {
    pub fn cov(&self) -> &SpdMatrix<T> {
        &self.cov
    }

    fn mean(&self, ctx: &Context<'_, T>) -> Vec<T> {
        let c = self.center.resolve(ctx);
        let dev: Vec<T> = ctx.current.iter().zip(&c).map(|(&x, &ci)| x - ci).collect();
        let shift = self.gain.mul_vec(&dev).expect("dimension checked");
        c.iter().zip(shift).map(|(&ci, s)| ci + s).collect()
    }
}

impl<T: Real> Proposal<T> for SorTrial<T> {
    fn sample(&self, rng: &mut RngStream, ctx: &Context<'_, T>) -> Vec<T> {
        mvn_sample_unchecked(rng, &self.mean(ctx), &self.cov)
    }

    fn log_density(&self, y: &[T], ctx: &Context<'_, T>) -> Result<T> {
        if y.len() != self.cov.dim() || ctx.current.len() != self.cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cov.dim(),
                found: y.len(),
            });
        }
        Ok(mvn_logpdf_unchecked(y, &self.mean(ctx), &self.cov))
    }
}

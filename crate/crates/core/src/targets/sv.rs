use std::path::Path;

use rand::Rng;

use super::Target;
use crate::error::{Error, Result};
use crate::real::Real;

/// Which quantity carries the volatility level in the latent conditional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LatentLevel {
    /// `y_t ~ N(0, β² e^{h_t})`, `h_t ~ N(φ h_{t-1}, σ²)`; paired with the
    /// inverse-gamma update of β².
    #[default]
    Beta,
    /// `y_t ~ N(0, e^{h_t})`, `h_t ~ N(α + φ h_{t-1}, σ²)` with `α = ln β²`.
    Alpha,
}

/// Stochastic volatility model: observations `y_1..y_T`.
#[derive(Clone, Debug)]
pub struct SvModel<T> {
    y: Vec<T>,
    y2: Vec<T>,
    level: LatentLevel,
}

/// Parameters and latent path of one Gibbs chain; `h[0]` is `h_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvState<T> {
    pub beta2: T,
    pub phi: T,
    pub sigma2: T,
    pub h: Vec<T>,
}

impl<T: Real> SvState<T> {
    pub fn alpha(&self) -> T {
        self.beta2.ln()
    }
}

/// Inverse-gamma draw with the given shape and scale (mean `scale/(shape-1)`).
pub fn sample_inverse_gamma<T: Real, R: Rng + ?Sized>(rng: &mut R, shape: T, scale: T) -> T {
    scale / T::sample_gamma(rng, shape, T::one())
}

impl<T: Real> SvModel<T> {
    pub fn new(y: Vec<T>, level: LatentLevel) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "stochastic volatility needs T >= 2 observations, got {}",
                y.len()
            )));
        }
        let y2 = y.iter().map(|&v| v * v).collect();
        Ok(Self { y, y2, level })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn observations(&self) -> &[T] {
        &self.y
    }

    pub fn level(&self) -> LatentLevel {
        self.level
    }

    /// Simulates `(y_{1:T}, h_{1:T})` from the α-parametrized model with
    /// `h_0 ~ N(0, σ²/(1-φ²))`.
    pub fn simulate<R: Rng + ?Sized>(
        rng: &mut R,
        len: usize,
        alpha: T,
        phi: T,
        sigma2: T,
    ) -> (Vec<T>, Vec<T>) {
        let sigma = sigma2.sqrt();
        let mut h_prev = T::standard_normal(rng) * sigma / (T::one() - phi * phi).sqrt();
        let mut ys = Vec::with_capacity(len);
        let mut hs = Vec::with_capacity(len);
        for _ in 0..len {
            let h = alpha + phi * h_prev + sigma * T::standard_normal(rng);
            ys.push((h * T::of(0.5)).exp() * T::standard_normal(rng));
            hs.push(h);
            h_prev = h;
        }
        (ys, hs)
    }

    fn shape(&self) -> T {
        T::from_count(self.y.len() - 1) * T::of(0.5)
    }

    /// `(shape, scale)` of `β² | h, y`: `((T-1)/2, Σ y_t² e^{-h_t} / 2)`.
    pub fn beta2_conditional(&self, h: &[T]) -> Result<(T, T)> {
        let scale = self
            .y2
            .iter()
            .zip(h)
            .map(|(&y2, &ht)| y2 * (-ht).exp())
            .sum::<T>()
            * T::of(0.5);
        finite_scale(scale, "beta^2")?;
        Ok((self.shape(), scale))
    }

    /// `(shape, scale)` of `σ² | φ, h, y`:
    /// `((T-1)/2, Σ_{t≥2} (h_t - φ h_{t-1})²/2 + h_1²(1-φ²))`.
    pub fn sigma2_conditional(&self, phi: T, h: &[T]) -> Result<(T, T)> {
        let sum: T = h
            .windows(2)
            .map(|w| {
                let e = w[1] - phi * w[0];
                e * e
            })
            .sum();
        let scale = sum * T::of(0.5) + h[0] * h[0] * (T::one() - phi * phi);
        finite_scale(scale, "sigma^2")?;
        Ok((self.shape(), scale))
    }

    /// Draws β² and σ² from their inverse-gamma full conditionals.
    pub fn draw_scales<R: Rng + ?Sized>(&self, state: &mut SvState<T>, rng: &mut R) -> Result<()> {
        let (a, b) = self.beta2_conditional(&state.h)?;
        let beta2 = sample_inverse_gamma(rng, a, b);
        let (a, b) = self.sigma2_conditional(state.phi, &state.h)?;
        let sigma2 = sample_inverse_gamma(rng, a, b);
        if !(beta2.is_finite() && beta2 > T::zero() && sigma2.is_finite() && sigma2 > T::zero()) {
            return Err(Error::Overflow(format!(
                "inverse-gamma draw out of range (beta^2 = {beta2}, sigma^2 = {sigma2})"
            )));
        }
        state.beta2 = beta2;
        state.sigma2 = sigma2;
        Ok(())
    }

    /// `log π(φ | σ², h)` up to a constant; `-inf` outside `(-1, 1)`.
    pub fn phi_log_conditional(&self, phi: T, sigma2: T, h: &[T]) -> T {
        if !(phi > -T::one() && phi < T::one()) {
            return T::neg_infinity();
        }
        let n = h.len();
        let inner_sq: T = h[1..n - 1].iter().map(|&v| v * v).sum();
        let cross: T = h.windows(2).map(|w| w[1] * w[0]).sum();
        T::of(0.5) * (T::one() - phi * phi).ln() - phi * phi / (T::of(2.0) * sigma2) * inner_sq
            + phi / sigma2 * cross
    }

    fn level_terms(&self, state: &SvState<T>) -> (T, T) {
        // (mean offset in the transition, observation scale multiplier on y²)
        match self.level {
            LatentLevel::Beta => (T::zero(), T::one() / state.beta2),
            LatentLevel::Alpha => (state.alpha(), T::one()),
        }
    }

    /// `log π(h_t | h_{-t}, θ, y)` up to a constant, for `t` in `0..T`
    /// (zero-based) evaluated at `ht`.
    pub fn latent_log_conditional(&self, t: usize, ht: T, state: &SvState<T>) -> T {
        let (offset, obs_scale) = self.level_terms(state);
        let phi = state.phi;
        let h = &state.h;
        let mut quad = if t == 0 {
            ht * ht * (T::one() - phi * phi)
        } else {
            let e = ht - offset - phi * h[t - 1];
            e * e
        };
        if t + 1 < h.len() {
            let e = h[t + 1] - offset - phi * ht;
            quad += e * e;
        }
        -quad / (T::of(2.0) * state.sigma2)
            - T::of(0.5) * (ht + self.y2[t] * obs_scale * (-ht).exp())
    }

    /// Derivative of [`Self::latent_log_conditional`] in `ht`.
    pub fn latent_log_conditional_derivative(&self, t: usize, ht: T, state: &SvState<T>) -> T {
        let (offset, obs_scale) = self.level_terms(state);
        let phi = state.phi;
        let h = &state.h;
        let mut dquad = if t == 0 {
            T::of(2.0) * ht * (T::one() - phi * phi)
        } else {
            T::of(2.0) * (ht - offset - phi * h[t - 1])
        };
        if t + 1 < h.len() {
            dquad -= T::of(2.0) * phi * (h[t + 1] - offset - phi * ht);
        }
        -dquad / (T::of(2.0) * state.sigma2)
            - T::of(0.5) * (T::one() - self.y2[t] * obs_scale * (-ht).exp())
    }

    pub fn phi_slice<'a>(&'a self, state: &'a SvState<T>) -> PhiSlice<'a, T> {
        PhiSlice { model: self, state }
    }

    pub fn latent_slice<'a>(&'a self, state: &'a SvState<T>, t: usize) -> LatentSlice<'a, T> {
        LatentSlice {
            model: self,
            state,
            t,
        }
    }
}

fn finite_scale<T: Real>(scale: T, what: &str) -> Result<()> {
    if scale.is_finite() && scale > T::zero() {
        Ok(())
    } else {
        Err(Error::Overflow(format!(
            "inverse-gamma scale for {what} is {scale}"
        )))
    }
}

/// One-dimensional target `φ ↦ log π(φ | σ², h)`.
pub struct PhiSlice<'a, T> {
    model: &'a SvModel<T>,
    state: &'a SvState<T>,
}

impl<T: Real> Target<T> for PhiSlice<'_, T> {
    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, x: &[T]) -> T {
        self.model
            .phi_log_conditional(x[0], self.state.sigma2, &self.state.h)
    }
}

/// One-dimensional target `h_t ↦ log π(h_t | ·)`.
pub struct LatentSlice<'a, T> {
    model: &'a SvModel<T>,
    state: &'a SvState<T>,
    t: usize,
}

impl<T: Real> Target<T> for LatentSlice<'_, T> {
    fn dim(&self) -> usize {
        1
    }

    fn log_density(&self, x: &[T]) -> T {
        let v = self.model.latent_log_conditional(self.t, x[0], self.state);
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        Some(vec![self
            .model
            .latent_log_conditional_derivative(self.t, x[0], self.state)])
    }
}

/// Reads SV observations from a CSV with header `t,y`, ordered by `t`.
pub fn read_sv_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
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
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "y" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `t,y`".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let t: i64 = rec[0].parse().map_err(|e| Error::Parse {
            line,
            message: format!("t: {e}"),
        })?;
        let y: f64 = rec[1].parse().map_err(|e| Error::Parse {
            line,
            message: format!("y: {e}"),
        })?;
        if !y.is_finite() {
            return Err(Error::Parse {
                line,
                message: "y must be finite".into(),
            });
        }
        rows.push((t, y));
    }
    rows.sort_by_key(|r| r.0);
    Ok(rows.into_iter().map(|r| r.1).collect())
}

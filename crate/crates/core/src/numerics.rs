//! Central-difference gradients and the canonical Poisson bracket.
//!
//! A phase point is a flat slice `z = [q_1, .., q_n, p_1, .., p_n]`. The
//! bracket follows the convention `{p_i, q_j} = δ_ij`:
//!
//! `{f, g} = Σ_k (∂f/∂p_k ∂g/∂q_k - ∂f/∂q_k ∂g/∂p_k)`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A scalar function on phase space.
pub trait PhaseFunction {
    fn eval(&self, z: &[f64]) -> Result<f64>;

    /// Exact gradient, when one is implemented.
    fn analytic_gradient(&self, _z: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }
}

impl<F> PhaseFunction for F
where
    F: Fn(&[f64]) -> Result<f64>,
{
    fn eval(&self, z: &[f64]) -> Result<f64> {
        self(z)
    }
}

/// A phase function with both a value and a hand-written gradient.
pub struct WithGradient<V, G> {
    pub value: V,
    pub gradient: G,
}

impl<V, G> PhaseFunction for WithGradient<V, G>
where
    V: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    fn eval(&self, z: &[f64]) -> Result<f64> {
        (self.value)(z)
    }

    fn analytic_gradient(&self, z: &[f64]) -> Option<Result<Vec<f64>>> {
        Some((self.gradient)(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    FiniteDifference,
    AnalyticIfAvailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Absolute,
    /// Divide by the largest magnitude among the individual products.
    TermScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketConfig {
    pub mode: GradientMode,
    pub fd_step: f64,
    pub normalization: Normalization,
}

impl Default for BracketConfig {
    fn default() -> Self {
        Self {
            mode: GradientMode::FiniteDifference,
            fd_step: DEFAULT_FD_STEP,
            normalization: Normalization::Absolute,
        }
    }
}

impl BracketConfig {
    pub fn finite_difference(fd_step: f64) -> Result<Self> {
        if !(fd_step > 0.0 && fd_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "fd_step must be > 0, got {fd_step}"
            )));
        }
        Ok(Self {
            fd_step,
            ..Self::default()
        })
    }

    pub fn analytic() -> Self {
        Self {
            mode: GradientMode::AnalyticIfAvailable,
            ..Self::default()
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }
}

/// `(f(z + h e_k) - f(z - h e_k)) / 2h` for every coordinate.
pub fn grad_fd<F: PhaseFunction + ?Sized>(f: &F, z: &[f64], h: f64) -> Result<Vec<f64>> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step must be > 0, got {h}"
        )));
    }
    let mut work = z.to_vec();
    let mut grad = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        work[k] = z[k] + h;
        let up = f.eval(&work)?;
        work[k] = z[k] - h;
        let down = f.eval(&work)?;
        work[k] = z[k];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

pub fn gradient<F: PhaseFunction + ?Sized>(
    f: &F,
    z: &[f64],
    cfg: &BracketConfig,
) -> Result<Vec<f64>> {
    if cfg.mode == GradientMode::AnalyticIfAvailable {
        if let Some(g) = f.analytic_gradient(z) {
            return g;
        }
    }
    grad_fd(f, z, cfg.fd_step)
}

/// A bracket value together with the largest single product
/// `|∂f/∂p_k ∂g/∂q_k|` or `|∂f/∂q_k ∂g/∂p_k|`,
/// the natural scale against which its rounding error should be judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub value: f64,
    pub scale: f64,
}

pub fn bracket_from_gradients(df: &[f64], dg: &[f64]) -> Result<Bracket> {
    if df.len() != dg.len() || !df.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "gradients of lengths {} and {} are not on the same phase space",
            df.len(),
            dg.len()
        )));
    }
    let n = df.len() / 2;
    let (mut value, mut scale) = (0.0, 0.0);
    for k in 0..n {
        let a = df[n + k] * dg[k];
        let b = df[k] * dg[n + k];
        value += a - b;
        scale = f64::max(scale, a.abs().max(b.abs()));
    }
    Ok(Bracket { value, scale })
}

pub fn bracket_with_scale<F, G>(f: &F, g: &G, z: &[f64], cfg: &BracketConfig) -> Result<Bracket>
where
    F: PhaseFunction + ?Sized,
    G: PhaseFunction + ?Sized,
{
    if !z.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "phase point has odd length {}",
            z.len()
        )));
    }
    bracket_from_gradients(&gradient(f, z, cfg)?, &gradient(g, z, cfg)?)
}

/// `{f, g}` at `z`; with [`Normalization::TermScaled`] the result is divided by
/// the bracket's term scale (when that is nonzero).
pub fn poisson_bracket<F, G>(f: &F, g: &G, z: &[f64], cfg: &BracketConfig) -> Result<f64>
where
    F: PhaseFunction + ?Sized,
    G: PhaseFunction + ?Sized,
{
    let b = bracket_with_scale(f, g, z, cfg)?;
    Ok(match cfg.normalization {
        Normalization::Absolute => b.value,
        Normalization::TermScaled if b.scale > 0.0 => b.value / b.scale,
        Normalization::TermScaled => b.value,
    })
}

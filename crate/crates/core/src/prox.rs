//! Thresholding operators and the scaled minimax-concave penalty.
//!
//! Scalar operators:
//!
//! - soft:  `sign(x) · max(0, |x| − λ)`, the prox of `λ|x|`.
//! - firm:  zero on `|x| ≤ λ`, identity on `|x| ≥ a`, and the line through
//!   `(λ, 0)` and `(a, a)` in between. This is the prox of the scaled MC
//!   penalty whenever the prox subproblem stays convex.
//! - hard:  keep `x` when `|x| > √(2λ)`, else zero; the prox of `λ·1{x≠0}`.
//!   At the tie `|x| = √(2λ)` both 0 and `x` are minimizers and 0 is returned.
//!
//! The matrix variants apply these either entry by entry or to the singular
//! values of a thin SVD (`U Θ(Σ) Vᵀ`).

use nalgebra::DMatrix;

use crate::error::{invalid_param, Result};
use crate::linalg::ThinSvd;

/// Threshold pair for the firm operator: zero below `lambda`, identity above `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    lambda: f64,
    a: f64,
}

impl ThresholdParams {
    /// Requires `0 < lambda < a`. The degenerate `a == lambda` is rejected.
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        check_threshold(lambda)?;
        if !(a > lambda) || a.is_nan() {
            return Err(invalid_param(format!(
                "firm threshold needs a > lambda, got lambda = {lambda}, a = {a}"
            )));
        }
        Ok(Self { lambda, a })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// GMC penalty settings for the diagonal case `BᵀB = b²I`.
///
/// `gamma` controls nonconvexity. Solvers require `gamma ∈ (0, 1]`;
/// `gamma = 0` is allowed for penalty evaluation only, where the penalty
/// collapses to the ℓ1 norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmcParams {
    pub b: f64,
    pub gamma: f64,
}

impl GmcParams {
    /// The `b` that keeps `weight·ψ_B(z) + (mu/2)‖y − z‖²` convex at the
    /// boundary: `b = √(mu·gamma / weight)`.
    pub fn for_subproblem(weight: f64, mu: f64, gamma: f64) -> Result<Self> {
        if !(weight > 0.0) || !(mu > 0.0) {
            return Err(invalid_param(format!(
                "weight and mu must be positive, got weight = {weight}, mu = {mu}"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(invalid_param(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        Ok(Self {
            b: (mu * gamma / weight).sqrt(),
            gamma,
        })
    }
}

fn check_threshold(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid_param(format!("threshold must be positive and finite, got {lambda}")))
    }
}

#[inline]
pub(crate) fn soft(x: f64, lambda: f64) -> f64 {
    let mag = x.abs() - lambda;
    if mag > 0.0 {
        mag.copysign(x)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn hard(x: f64, lambda: f64) -> f64 {
    if x.abs() > (2.0 * lambda).sqrt() {
        x
    } else {
        0.0
    }
}

pub fn soft_threshold(x: f64, lambda: f64) -> Result<f64> {
    check_threshold(lambda)?;
    Ok(soft(x, lambda))
}

pub fn hard_threshold(x: f64, lambda: f64) -> Result<f64> {
    check_threshold(lambda)?;
    Ok(hard(x, lambda))
}

#[inline]
pub fn firm_threshold(x: f64, p: &ThresholdParams) -> f64 {
    let mag = x.abs();
    if mag <= p.lambda {
        0.0
    } else if mag >= p.a {
        x
    } else {
        (p.a * (mag - p.lambda) / (p.a - p.lambda)).copysign(x)
    }
}

/// Scaled MC penalty `φ_b`. Expects `b ≥ 0`; `b = 0` gives `|y|`.
pub fn scaled_mc_penalty(y: f64, b: f64) -> f64 {
    debug_assert!(b >= 0.0, "scaled MC penalty needs b >= 0");
    let b2 = b * b;
    if b2 == 0.0 {
        return y.abs();
    }
    if y.abs() <= 1.0 / b2 {
        y.abs() - 0.5 * b2 * y * y
    } else {
        0.5 / b2
    }
}

/// GMC penalty for `BᵀB = b²I`, which separates into a sum of scaled MC terms.
pub fn gmc_penalty_separable<'a>(z: impl IntoIterator<Item = &'a f64>, b: f64) -> f64 {
    z.into_iter().map(|&v| scaled_mc_penalty(v, b)).sum()
}

pub fn entrywise_soft(m: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    check_threshold(lambda)?;
    Ok(m.map(|v| soft(v, lambda)))
}

pub fn entrywise_hard(m: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    check_threshold(lambda)?;
    Ok(m.map(|v| hard(v, lambda)))
}

pub fn entrywise_firm(m: &DMatrix<f64>, p: &ThresholdParams) -> DMatrix<f64> {
    m.map(|v| firm_threshold(v, p))
}

/// `U Θ(Σ) Vᵀ` with firm thresholding of the singular values.
pub fn svt_firm(m: &DMatrix<f64>, p: &ThresholdParams) -> Result<DMatrix<f64>> {
    Ok(ThinSvd::new(m)?.recompose(|s| firm_threshold(s, p)))
}

pub fn svt_hard(m: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    check_threshold(lambda)?;
    Ok(ThinSvd::new(m)?.recompose(|s| hard(s, lambda)))
}

/// Classical singular value thresholding, the prox of `lambda‖·‖_*`.
pub fn svt_soft(m: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    check_threshold(lambda)?;
    Ok(ThinSvd::new(m)?.recompose(|s| soft(s, lambda)))
}

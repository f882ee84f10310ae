//! Augmented Lagrangian values and KKT residuals.

use nalgebra::DMatrix;

use super::steps::{
    gmc_c1_update, gmc_c2_update, s0l0_c_update, Problem, S0l0State, Shrinkage, SolverState,
    ThreeBlockModel,
};
use super::trace::KktResiduals;
use crate::error::Result;
use crate::linalg::ThinSvd;
use crate::prox::gmc_penalty_separable;

/// Entries below this fraction of the largest magnitude count as zero in the
/// rank and ℓ0 terms.
pub const COUNT_FLOOR: f64 = 1e-12;

fn half_fit(problem: &Problem, j: &DMatrix<f64>) -> f64 {
    let x = problem.x();
    0.5 * (x - x * j).norm_squared()
}

fn without_diagonal(c: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = c.clone();
    crate::linalg::zero_diagonal(&mut out);
    out
}

/// Scaled-MC parameter `b = √(μγ/w)` for a block, or `0` (ℓ1) under soft shrinkage.
fn block_b(weight: f64, mu: f64, shrinkage: Shrinkage) -> f64 {
    match shrinkage {
        Shrinkage::Firm { gamma } => (mu * gamma / weight).sqrt(),
        Shrinkage::Soft => 0.0,
    }
}

/// Augmented Lagrangian of the three-block problem at `state`:
///
/// ```text
/// ½‖X − XJ‖² + λψ(σ(C₁)) + τψ(C₂)
///   + μ₁/2‖J − C₁‖² + μ₂/2‖J − C₂ + diag(C₂)‖²
///   + ⟨Λ₁, J − C₁⟩ + ⟨Λ₂, J − C₂ + diag(C₂)⟩
/// ```
///
/// with each GMC penalty evaluated at the `b` that keeps its block
/// subproblem convex for the current `μᵢ`. Soft shrinkage gives the
/// nuclear and ℓ1 norms.
pub fn lagrangian_value(
    problem: &Problem,
    state: &SolverState,
    model: &ThreeBlockModel,
) -> Result<f64> {
    let mut value = half_fit(problem, &state.j);
    if model.rank_weight > 0.0 {
        let sv = ThinSvd::new(&state.c1)?.singular_values;
        let b = block_b(model.rank_weight, state.mu1, model.shrinkage);
        value += model.rank_weight * gmc_penalty_separable(sv.iter(), b);
    }
    if model.sparsity_weight > 0.0 {
        let b = block_b(model.sparsity_weight, state.mu2, model.shrinkage);
        value += model.sparsity_weight * gmc_penalty_separable(state.c2.iter(), b);
    }
    let gap1 = &state.j - &state.c1;
    let gap2 = &state.j - without_diagonal(&state.c2);
    value += 0.5 * state.mu1 * gap1.norm_squared() + state.lambda1.dot(&gap1);
    value += 0.5 * state.mu2 * gap2.norm_squared() + state.lambda2.dot(&gap2);
    Ok(value)
}

fn count_above_floor<'a>(values: impl Iterator<Item = &'a f64> + Clone) -> usize {
    let top = values.clone().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return 0;
    }
    values.filter(|v| v.abs() > COUNT_FLOOR * top).count()
}

/// Augmented Lagrangian of the two-block problem, with
/// `λ·rank(C) + τ·‖C‖₀` counted above [`COUNT_FLOOR`].
pub fn lagrangian_value_s0l0(
    problem: &Problem,
    state: &S0l0State,
    lambda: f64,
    tau: f64,
) -> Result<f64> {
    let mut value = half_fit(problem, &state.j);
    if lambda > 0.0 {
        let sv = ThinSvd::new(&state.c)?.singular_values;
        value += lambda * count_above_floor(sv.iter()) as f64;
    }
    if tau > 0.0 {
        value += tau * count_above_floor(state.c.iter()) as f64;
    }
    let gap = &state.j - without_diagonal(&state.c);
    value += 0.5 * state.mu * gap.norm_squared() + state.lambda.dot(&gap);
    Ok(value)
}

fn stationarity(problem: &Problem, j: &DMatrix<f64>) -> DMatrix<f64> {
    // −Xᵀ(X − XJ) = XᵀX·J − XᵀX
    problem.gram() * j - problem.gram()
}

pub fn kkt_residuals(
    problem: &Problem,
    state: &SolverState,
    model: &ThreeBlockModel,
) -> Result<KktResiduals> {
    let r3 = (stationarity(problem, &state.j) + &state.lambda1 + &state.lambda2).norm();
    Ok(KktResiduals {
        r1: (&state.j - &state.c1).norm(),
        r2: Some((&state.j - &state.c2).norm()),
        r3,
        r4: (&state.c1 - gmc_c1_update(state, model)?).norm(),
        r5: Some((&state.c2 - gmc_c2_update(state, model)?).norm()),
    })
}

pub fn kkt_residuals_s0l0(
    problem: &Problem,
    state: &S0l0State,
    lambda: f64,
    tau: f64,
) -> Result<KktResiduals> {
    Ok(KktResiduals {
        r1: (&state.j - &state.c).norm(),
        r2: None,
        r3: (stationarity(problem, &state.j) + &state.lambda).norm(),
        r4: (&state.c - s0l0_c_update(state, lambda, tau)?).norm(),
        r5: None,
    })
}

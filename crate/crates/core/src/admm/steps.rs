//! Individual ADMM block updates.
//!
//! Each function is one line of the iteration; the solvers in [`super::gmc`]
//! and [`super::s0l0`] sequence them. They are public so that diagnostics and
//! tests can drive an iteration one block at a time.

use nalgebra::{DMatrix, DVector};

use super::config::SolverConfig;
use super::trace::IterationRecord;
use crate::error::{invalid_input, invalid_param, Result};
use crate::linalg::{ensure_finite, zero_diagonal, SortedEigen};
use crate::prox::{self, ThresholdParams};

/// Data matrix plus the factorization of `XᵀX` reused by every J-update.
///
/// `XᵀX + sI` only changes through the scalar shift `s`, so one symmetric
/// eigendecomposition serves all iterations.
#[derive(Debug, Clone)]
pub struct Problem {
    x: DMatrix<f64>,
    gram: DMatrix<f64>,
    gram_eig: SortedEigen,
}

impl Problem {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() < 2 {
            return Err(invalid_input(format!(
                "data matrix needs at least one row and two columns, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        ensure_finite(&x, "data matrix")?;
        let gram = x.tr_mul(&x);
        let gram_eig = SortedEigen::new(&gram)?;
        Ok(Self { x, gram, gram_eig })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn num_points(&self) -> usize {
        self.x.ncols()
    }

    /// Solves `(XᵀX + shift·I) J = rhs`.
    pub fn solve_shifted(&self, shift: f64, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if !(shift > 0.0) {
            return Err(invalid_param(format!("system shift must be positive, got {shift}")));
        }
        let v = &self.gram_eig.vectors;
        let inv = DVector::from_iterator(
            v.ncols(),
            self.gram_eig.values.iter().map(|&w| 1.0 / (w.max(0.0) + shift)),
        );
        let mut projected = v.tr_mul(rhs);
        for (i, mut row) in projected.row_iter_mut().enumerate() {
            row *= inv[i];
        }
        let j = v * projected;
        ensure_finite(&j, "J-update")?;
        Ok(j)
    }
}

/// Iterate of the three-block scheme (`J`, `C₁`, `C₂` and their multipliers).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub j: DMatrix<f64>,
    pub c1: DMatrix<f64>,
    pub c2: DMatrix<f64>,
    pub lambda1: DMatrix<f64>,
    pub lambda2: DMatrix<f64>,
    pub mu1: f64,
    pub mu2: f64,
    pub iter: usize,
}

impl SolverState {
    pub fn zeros(n: usize, cfg: &SolverConfig) -> Self {
        let z = DMatrix::zeros(n, n);
        Self {
            j: z.clone(),
            c1: z.clone(),
            c2: z.clone(),
            lambda1: z.clone(),
            lambda2: z,
            mu1: cfg.mu1_init,
            mu2: cfg.mu2_init,
            iter: 0,
        }
    }
}

/// Iterate of the two-block scheme (`J`, `C`, `Λ`).
#[derive(Debug, Clone, PartialEq)]
pub struct S0l0State {
    pub j: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub lambda: DMatrix<f64>,
    pub mu: f64,
    pub iter: usize,
}

impl S0l0State {
    pub fn zeros(n: usize, cfg: &SolverConfig) -> Self {
        let z = DMatrix::zeros(n, n);
        Self {
            j: z.clone(),
            c: z.clone(),
            lambda: z,
            mu: cfg.mu2_init,
            iter: 0,
        }
    }
}

/// Shrinkage used by the three-block scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shrinkage {
    /// Firm thresholding with knees `w/μ` and `w/(γμ)`.
    Firm { gamma: f64 },
    /// Soft thresholding at `w/μ`; the `γ → 0` limit of `Firm`.
    Soft,
}

/// Weights and shrinkage rule of a three-block run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBlockModel {
    pub rank_weight: f64,
    pub sparsity_weight: f64,
    pub shrinkage: Shrinkage,
}

/// Relative gap used when `γ = 1` would make the firm knees coincide.
pub const COINCIDENT_KNEE_GAP: f64 = 1e-9;

/// Upper knee `threshold/γ` of the firm operator. When that does not exceed
/// `threshold` (only at `γ = 1`), it is nudged to `threshold·(1 + 1e-9)` and
/// the second value reports the substitution.
pub fn firm_knee(threshold: f64, gamma: f64) -> (f64, bool) {
    let a = threshold / gamma;
    if a > threshold {
        (a, false)
    } else {
        (threshold * (1.0 + COINCIDENT_KNEE_GAP), true)
    }
}

fn shrink_params(weight: f64, mu: f64, gamma: f64) -> Result<ThresholdParams> {
    let threshold = weight / mu;
    ThresholdParams::new(threshold, firm_knee(threshold, gamma).0)
}

/// `J = [XᵀX + (μ₁+μ₂)I]⁻¹ [XᵀX + μ₁C₁ + μ₂C₂ − Λ₁ − Λ₂]`.
pub fn j_update(problem: &Problem, state: &SolverState) -> Result<DMatrix<f64>> {
    let rhs = problem.gram() + &state.c1 * state.mu1 + &state.c2 * state.mu2
        - &state.lambda1
        - &state.lambda2;
    problem.solve_shifted(state.mu1 + state.mu2, &rhs)
}

/// `J = [XᵀX + μI]⁻¹ [XᵀX + μC − Λ]`.
pub fn j_update_s0l0(problem: &Problem, state: &S0l0State) -> Result<DMatrix<f64>> {
    let rhs = problem.gram() + &state.c * state.mu - &state.lambda;
    problem.solve_shifted(state.mu, &rhs)
}

/// Scales each nonzero column to unit Euclidean norm. Zero columns stay zero.
pub fn normalize_columns(mut j: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in j.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    j
}

/// Low-rank block: shrink the singular values of `J + Λ₁/μ₁`.
pub fn gmc_c1_update(state: &SolverState, model: &ThreeBlockModel) -> Result<DMatrix<f64>> {
    let target = &state.j + &state.lambda1 / state.mu1;
    if model.rank_weight == 0.0 {
        return Ok(target);
    }
    match model.shrinkage {
        Shrinkage::Firm { gamma } => {
            prox::svt_firm(&target, &shrink_params(model.rank_weight, state.mu1, gamma)?)
        }
        Shrinkage::Soft => prox::svt_soft(&target, model.rank_weight / state.mu1),
    }
}

/// Sparse block: shrink the entries of `J + Λ₂/μ₂`, then zero the diagonal.
pub fn gmc_c2_update(state: &SolverState, model: &ThreeBlockModel) -> Result<DMatrix<f64>> {
    let target = &state.j + &state.lambda2 / state.mu2;
    let mut c2 = if model.sparsity_weight == 0.0 {
        target
    } else {
        match model.shrinkage {
            Shrinkage::Firm { gamma } => prox::entrywise_firm(
                &target,
                &shrink_params(model.sparsity_weight, state.mu2, gamma)?,
            ),
            Shrinkage::Soft => prox::entrywise_soft(&target, model.sparsity_weight / state.mu2)?,
        }
    };
    zero_diagonal(&mut c2);
    Ok(c2)
}

/// Proximal average `λ·P_g + τ·P_f` of the hard-thresholding proxes of the
/// rank and ℓ0 penalties at `J + Λ/μ`. The ℓ0 component has its diagonal
/// zeroed; a zero weight drops its component entirely.
pub fn s0l0_c_update(state: &S0l0State, lambda: f64, tau: f64) -> Result<DMatrix<f64>> {
    if lambda < 0.0 || tau < 0.0 || (lambda + tau - 1.0).abs() > 1e-12 {
        return Err(invalid_param(format!(
            "proximal average weights must be nonnegative and sum to 1, got {lambda} and {tau}"
        )));
    }
    let target = &state.j + &state.lambda / state.mu;
    let mut c = DMatrix::zeros(target.nrows(), target.ncols());
    if lambda > 0.0 {
        let low_rank = prox::svt_hard(&target, lambda / state.mu)?;
        c += low_rank * lambda;
    }
    if tau > 0.0 {
        let mut sparse = prox::entrywise_hard(&target, tau / state.mu)?;
        zero_diagonal(&mut sparse);
        c += sparse * tau;
    }
    Ok(c)
}

/// `Λᵢ ← Λᵢ + μᵢ(J − Cᵢ)` for both blocks.
pub fn dual_update(state: &mut SolverState) {
    state.lambda1 += (&state.j - &state.c1) * state.mu1;
    state.lambda2 += (&state.j - &state.c2) * state.mu2;
}

pub fn dual_update_s0l0(state: &mut S0l0State) {
    state.lambda += (&state.j - &state.c) * state.mu;
}

/// `min(ρμ, μ_max)`.
pub fn mu_update(mu: f64, cfg: &SolverConfig) -> f64 {
    (cfg.rho * mu).min(cfg.mu_max)
}

/// True when every residual present in the record is `≤ epsilon`.
pub fn stopping_check(record: &IterationRecord, epsilon: f64) -> bool {
    [record.r_jc1, record.r_jc2, record.r_jj]
        .iter()
        .flatten()
        .all(|&r| r <= epsilon)
}

//! Closed-form low-rank representation and the convex LRSSC baseline.

use nalgebra::DMatrix;

use crate::admm::{Problem, SolverConfig, SolverFailure, SolverTrace, ThreeBlockSolver, Variant};
use crate::error::{invalid_input, invalid_param, Result};
use crate::linalg::{ensure_finite, ThinSvd};

/// A closed-form LRR representation `V₁ D V₁ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LrrSolution {
    pub c: DMatrix<f64>,
    /// Indices of the retained right singular directions of `X`.
    pub active_set: Vec<usize>,
}

fn right_vectors(svd: &ThinSvd, keep: &[usize]) -> DMatrix<f64> {
    let n = svd.v_t.ncols();
    let mut v = DMatrix::zeros(n, keep.len());
    for (dst, &i) in keep.iter().enumerate() {
        v.set_column(dst, &svd.v_t.row(i).transpose());
    }
    v
}

/// Noise-free LRR: `C = VVᵀ` with `V` spanning the row space of `X`.
///
/// Directions count as present when `σᵢ > max(n, N)·σ₁·1e-12`.
pub fn lrr_noiseless(x: &DMatrix<f64>) -> Result<LrrSolution> {
    ensure_finite(x, "data matrix")?;
    let svd = ThinSvd::new(x)?;
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(invalid_input("LRR needs a nonzero data matrix"));
    }
    let tol = x.nrows().max(x.ncols()) as f64 * top * 1e-12;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let v = right_vectors(&svd, &keep);
    Ok(LrrSolution {
        c: &v * v.transpose(),
        active_set: keep,
    })
}

/// Minimizer of `(λ/2)‖X − XC‖² + ‖C‖_*`:
/// `C = V₁(I − Σ₁⁻²/λ)V₁ᵀ` over the directions with `σᵢ > 1/√λ`.
pub fn lrr_noisy(x: &DMatrix<f64>, lambda: f64) -> Result<LrrSolution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid_param(format!("LRR weight must be positive, got {lambda}")));
    }
    ensure_finite(x, "data matrix")?;
    let n = x.ncols();
    let svd = ThinSvd::new(x)?;
    let cutoff = 1.0 / lambda.sqrt();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    if keep.is_empty() {
        return Ok(LrrSolution {
            c: DMatrix::zeros(n, n),
            active_set: keep,
        });
    }
    let v = right_vectors(&svd, &keep);
    let mut scaled = v.clone();
    for (col, &i) in keep.iter().enumerate() {
        let s = svd.singular_values[i];
        scaled.column_mut(col).scale_mut(1.0 - 1.0 / (lambda * s * s));
    }
    Ok(LrrSolution {
        c: scaled * v.transpose(),
        active_set: keep,
    })
}

/// Convex LRSSC, `½‖X − XC‖² + λ‖C‖_* + τ‖C‖₁` with `diag(C) = 0`, run
/// through the same three-block ADMM as GMC-LRSSC but with soft
/// thresholding in both shrinkage steps. `cfg.gamma` is ignored.
pub fn convex_lrssc(
    x: &DMatrix<f64>,
    cfg: &SolverConfig,
) -> std::result::Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
    let wrap = |error| SolverFailure {
        error,
        partial: SolverTrace::new(),
    };
    let problem = Problem::new(x.clone()).map_err(wrap)?;
    ThreeBlockSolver::new(&problem, cfg, Variant::Convex)
        .map_err(wrap)?
        .run()
}

//! Thin wrappers over the dense decompositions the solvers consume.
//!
//! Singular values come back nonnegative and in nonincreasing order;
//! symmetric eigenvalues come back in nondecreasing order with matching
//! eigenvector columns.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// A thin singular value decomposition `M = U diag(s) Vᵀ`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl ThinSvd {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        ensure_finite(m, "SVD input")?;
        let k = m.nrows().min(m.ncols());
        if k == 0 {
            return Ok(Self {
                u: DMatrix::zeros(m.nrows(), 0),
                singular_values: DVector::zeros(0),
                v_t: DMatrix::zeros(0, m.ncols()),
            });
        }
        let svd = to_faer(m)
            .thin_svd()
            .map_err(|e| Error::NumericalFailure(format!("SVD did not converge: {e:?}")))?;
        let s = svd.S().column_vector();
        Ok(Self {
            u: from_faer(svd.U()),
            singular_values: DVector::from_fn(k, |i, _| s[i]),
            v_t: from_faer(svd.V()).transpose(),
        })
    }

    /// Rebuilds `U diag(f(σ)) Vᵀ`.
    pub fn recompose(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled_u = self.u.clone();
        for (j, mut col) in scaled_u.column_iter_mut().enumerate() {
            col *= f(self.singular_values[j]);
        }
        scaled_u * &self.v_t
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SortedEigen {
    /// Reads the lower triangle only.
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        ensure_finite(m, "eigendecomposition input")?;
        let n = m.nrows();
        if n == 0 {
            return Ok(Self {
                values: DVector::zeros(0),
                vectors: DMatrix::zeros(0, 0),
            });
        }
        let eig = to_faer(m).self_adjoint_eigen(Side::Lower).map_err(|e| {
            Error::NumericalFailure(format!("symmetric eigendecomposition did not converge: {e:?}"))
        })?;
        let s = eig.S().column_vector();
        let values = DVector::from_fn(n, |i, _| s[i]);
        if values.as_slice().windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NumericalFailure("eigenvalues returned out of order".into()));
        }
        Ok(Self {
            values,
            vectors: from_faer(eig.U()),
        })
    }
}

/// Number of singular values above `rel_tol · σ₁`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    if m.is_empty() {
        return Ok(0);
    }
    let svd = ThinSvd::new(m)?;
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(svd.singular_values.iter().filter(|&&s| s > rel_tol * top).count())
}

/// Largest absolute entry (the entrywise ∞-norm).
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn ensure_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalFailure(format!("{what} contains non-finite entries")))
    }
}

pub fn zero_diagonal(m: &mut DMatrix<f64>) {
    let n = m.nrows().min(m.ncols());
    for i in 0..n {
        m[(i, i)] = 0.0;
    }
}

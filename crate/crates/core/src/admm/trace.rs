use std::fmt;

use crate::error::Error;

/// One row of a solver trace.
///
/// Residuals are entrywise ∞-norms. `r_jc2` and `mu1` are absent for the
/// two-block scheme, which records its single `‖J − C‖∞` in `r_jc1` and its
/// single penalty in `mu2`. `mu1`/`mu2` are the penalties used during the
/// iteration, before the growth step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub r_jc1: Option<f64>,
    pub r_jc2: Option<f64>,
    pub r_jj: Option<f64>,
    pub lagrangian: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
        })
    }
}

/// Frobenius-norm residuals of the first-order optimality conditions.
///
/// - `r1 = ‖J − C₁‖`, `r2 = ‖J − C₂‖` (primal feasibility)
/// - `r3 = ‖−Xᵀ(X − XJ) + Λ₁ + Λ₂‖` (stationarity in `J`)
/// - `r4`, `r5`: distance of `C₁`, `C₂` from the thresholding maps applied to
///   `J + Λᵢ/μᵢ`, i.e. the multiplier inclusions rewritten as fixed points.
///
/// The two-block scheme fills `r1`, `r3` and `r4` with its single-block
/// analogues and leaves `r2`, `r5` empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub r1: f64,
    pub r2: Option<f64>,
    pub r3: f64,
    pub r4: f64,
    pub r5: Option<f64>,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        [Some(self.r1), self.r2, Some(self.r3), Some(self.r4), self.r5]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub kkt: Option<KktResiduals>,
    /// Set when `γ = 1` forced the firm upper knee to be nudged above the
    /// lower one.
    pub knee_adjusted: bool,
}

impl SolverTrace {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
            termination: Termination::MaxIters,
            kkt: None,
            knee_adjusted: false,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

impl Default for SolverTrace {
    fn default() -> Self {
        Self::new()
    }
}

/// A solver error together with the iterations completed before it.
#[derive(Debug, thiserror::Error)]
#[error("{error} (after {} completed iterations)", partial.records.len())]
pub struct SolverFailure {
    #[source]
    pub error: Error,
    pub partial: SolverTrace,
}

impl From<SolverFailure> for Error {
    fn from(f: SolverFailure) -> Self {
        f.error
    }
}

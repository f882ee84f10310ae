//! Three-block ADMM: `J` (data fit), `C₁` (low rank), `C₂` (sparse, zero diagonal).
//!
//! With firm shrinkage this is GMC-LRSSC; with soft shrinkage it is the
//! convex nuclear + ℓ1 baseline.

use nalgebra::DMatrix;

use super::config::{SolverConfig, Variant};
use super::diagnostics::{kkt_residuals, lagrangian_value};
use super::steps::{
    dual_update, firm_knee, gmc_c1_update, gmc_c2_update, j_update, mu_update, normalize_columns,
    stopping_check, Problem, Shrinkage, SolverState, ThreeBlockModel,
};
use super::trace::{IterationRecord, SolverFailure, SolverTrace, Termination};
use crate::error::Result;
use crate::linalg::max_abs;

pub struct ThreeBlockSolver<'a> {
    problem: &'a Problem,
    cfg: SolverConfig,
    model: ThreeBlockModel,
    state: SolverState,
    trace: SolverTrace,
}

impl<'a> ThreeBlockSolver<'a> {
    pub fn new(problem: &'a Problem, cfg: &SolverConfig, variant: Variant) -> Result<Self> {
        let shrinkage = match variant {
            Variant::Gmc => Shrinkage::Firm { gamma: cfg.gamma },
            Variant::Convex => Shrinkage::Soft,
            Variant::S0L0 => {
                return Err(crate::error::invalid_param(
                    "the three-block solver handles the GMC and convex variants only",
                ))
            }
        };
        cfg.validate(variant)?;
        let (rank_weight, sparsity_weight) = cfg.effective_weights(variant);
        let mut trace = SolverTrace::new();
        if let Shrinkage::Firm { gamma } = shrinkage {
            trace.knee_adjusted = firm_knee(1.0, gamma).1;
        }
        Ok(Self {
            problem,
            cfg: cfg.clone(),
            model: ThreeBlockModel {
                rank_weight,
                sparsity_weight,
                shrinkage,
            },
            state: SolverState::zeros(problem.num_points(), cfg),
            trace,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn model(&self) -> &ThreeBlockModel {
        &self.model
    }

    pub fn trace(&self) -> &SolverTrace {
        &self.trace
    }

    /// One full iteration: J, optional normalization, C₁, C₂, duals, penalties.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let previous_j = self.state.j.clone();
        let mut j = j_update(self.problem, &self.state)?;
        if self.cfg.normalize_j {
            j = normalize_columns(j);
        }
        self.state.j = j;
        self.state.c1 = gmc_c1_update(&self.state, &self.model)?;
        self.state.c2 = gmc_c2_update(&self.state, &self.model)?;
        dual_update(&mut self.state);

        let record = IterationRecord {
            iter: self.state.iter + 1,
            r_jc1: Some(max_abs(&(&self.state.j - &self.state.c1))),
            r_jc2: Some(max_abs(&(&self.state.j - &self.state.c2))),
            r_jj: Some(max_abs(&(&self.state.j - previous_j))),
            lagrangian: Some(lagrangian_value(self.problem, &self.state, &self.model)?),
            mu1: Some(self.state.mu1),
            mu2: Some(self.state.mu2),
        };
        crate::linalg::ensure_finite(&self.state.lambda1, "multiplier")?;
        crate::linalg::ensure_finite(&self.state.lambda2, "multiplier")?;

        self.state.mu1 = mu_update(self.state.mu1, &self.cfg);
        self.state.mu2 = mu_update(self.state.mu2, &self.cfg);
        self.state.iter += 1;
        self.trace.records.push(record);
        Ok(record)
    }

    /// Iterates until the stopping test passes or `max_iters` is reached.
    /// Returns `C₁` and the finished trace.
    pub fn run(mut self) -> std::result::Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
        while self.state.iter < self.cfg.max_iters {
            let record = match self.step() {
                Ok(r) => r,
                Err(error) => return Err(self.fail(error)),
            };
            if stopping_check(&record, self.cfg.epsilon) {
                self.trace.termination = Termination::Converged;
                break;
            }
        }
        match kkt_residuals(self.problem, &self.state, &self.model) {
            Ok(kkt) => self.trace.kkt = Some(kkt),
            Err(error) => return Err(self.fail(error)),
        }
        Ok((self.state.c1, self.trace))
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }

    fn fail(self, error: crate::error::Error) -> SolverFailure {
        SolverFailure {
            error,
            partial: self.trace,
        }
    }
}

/// GMC-LRSSC: the three-block ADMM with firm thresholding.
pub fn gmc_lrssc_solve(
    x: &DMatrix<f64>,
    cfg: &SolverConfig,
) -> std::result::Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
    let problem = Problem::new(x.clone()).map_err(early_failure)?;
    ThreeBlockSolver::new(&problem, cfg, Variant::Gmc)
        .map_err(early_failure)?
        .run()
}

pub(crate) fn early_failure(error: crate::error::Error) -> SolverFailure {
    SolverFailure {
        error,
        partial: SolverTrace::new(),
    }
}

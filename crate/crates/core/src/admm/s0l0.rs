//! Two-block ADMM for rank (S₀) plus ℓ0 regularization.
//!
//! The joint prox of `λ·rank + τ·‖·‖₀` has no closed form, so each C-step
//! averages the two individual hard-thresholding proxes with weights `λ`, `τ`
//! (`λ + τ = 1`).

use nalgebra::DMatrix;

use super::config::{SolverConfig, Variant};
use super::diagnostics::{kkt_residuals_s0l0, lagrangian_value_s0l0};
use super::gmc::early_failure;
use super::steps::{
    dual_update_s0l0, j_update_s0l0, mu_update, normalize_columns, s0l0_c_update, stopping_check,
    Problem, S0l0State,
};
use super::trace::{IterationRecord, SolverFailure, SolverTrace, Termination};
use crate::error::Result;
use crate::linalg::max_abs;

pub struct S0l0Solver<'a> {
    problem: &'a Problem,
    cfg: SolverConfig,
    lambda: f64,
    tau: f64,
    state: S0l0State,
    trace: SolverTrace,
}

impl<'a> S0l0Solver<'a> {
    pub fn new(problem: &'a Problem, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate(Variant::S0L0)?;
        let (lambda, tau) = cfg.effective_weights(Variant::S0L0);
        Ok(Self {
            problem,
            cfg: cfg.clone(),
            lambda,
            tau,
            state: S0l0State::zeros(problem.num_points(), cfg),
            trace: SolverTrace::new(),
        })
    }

    pub fn state(&self) -> &S0l0State {
        &self.state
    }

    pub fn step(&mut self) -> Result<IterationRecord> {
        let previous_j = self.state.j.clone();
        let mut j = j_update_s0l0(self.problem, &self.state)?;
        if self.cfg.normalize_j {
            j = normalize_columns(j);
        }
        self.state.j = j;
        self.state.c = s0l0_c_update(&self.state, self.lambda, self.tau)?;
        dual_update_s0l0(&mut self.state);
        crate::linalg::ensure_finite(&self.state.lambda, "multiplier")?;

        let record = IterationRecord {
            iter: self.state.iter + 1,
            r_jc1: Some(max_abs(&(&self.state.j - &self.state.c))),
            r_jc2: None,
            r_jj: Some(max_abs(&(&self.state.j - previous_j))),
            lagrangian: Some(lagrangian_value_s0l0(
                self.problem,
                &self.state,
                self.lambda,
                self.tau,
            )?),
            mu1: None,
            mu2: Some(self.state.mu),
        };
        self.state.mu = mu_update(self.state.mu, &self.cfg);
        self.state.iter += 1;
        self.trace.records.push(record);
        Ok(record)
    }

    /// Iterates to convergence or `max_iters`; returns `C` and the trace.
    pub fn run(mut self) -> std::result::Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
        while self.state.iter < self.cfg.max_iters {
            let record = match self.step() {
                Ok(r) => r,
                Err(error) => {
                    return Err(SolverFailure {
                        error,
                        partial: self.trace,
                    })
                }
            };
            if stopping_check(&record, self.cfg.epsilon) {
                self.trace.termination = Termination::Converged;
                break;
            }
        }
        match kkt_residuals_s0l0(self.problem, &self.state, self.lambda, self.tau) {
            Ok(kkt) => self.trace.kkt = Some(kkt),
            Err(error) => {
                return Err(SolverFailure {
                    error,
                    partial: self.trace,
                })
            }
        }
        Ok((self.state.c, self.trace))
    }
}

/// S₀/ℓ₀-LRSSC: the two-block ADMM with a hard-thresholding proximal average.
pub fn s0l0_lrssc_solve(
    x: &DMatrix<f64>,
    cfg: &SolverConfig,
) -> std::result::Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
    let problem = Problem::new(x.clone()).map_err(early_failure)?;
    S0l0Solver::new(&problem, cfg).map_err(early_failure)?.run()
}

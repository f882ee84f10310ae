//! ADMM solvers for ℓ0-motivated low-rank sparse self-representation.
//!
//! Both schemes split the self-expressive objective
//! `½‖X − XC‖² + λ·g(C) + τ·f(C)` (with `diag(C) = 0`) by introducing `J`
//! for the data-fit term, then alternate exact block minimizations of the
//! augmented Lagrangian with multiplier ascent and a geometric penalty
//! schedule `μ ← min(ρμ, μ_max)`.
//!
//! - [`gmc_lrssc_solve`]: GMC penalties on singular values and entries,
//!   solved by firm thresholding.
//! - [`s0l0_lrssc_solve`]: rank and ℓ0 penalties, solved by a proximal
//!   average of hard thresholding steps.
//!
//! Iteration stops once `‖J − Cᵢ‖∞ ≤ ε` for every block and
//! `‖Jᵏ − Jᵏ⁻¹‖∞ ≤ ε`. Hitting `max_iters` is not an error; the trace records
//! it and the last iterate is returned.

mod config;
pub mod diagnostics;
mod gmc;
mod s0l0;
pub mod steps;
mod trace;

pub use config::{lambda_from_alpha, SolverConfig, Variant};
pub use diagnostics::{kkt_residuals, kkt_residuals_s0l0, lagrangian_value, lagrangian_value_s0l0};
pub use gmc::{gmc_lrssc_solve, ThreeBlockSolver};
pub use s0l0::{s0l0_lrssc_solve, S0l0Solver};
pub use steps::{Problem, S0l0State, Shrinkage, SolverState, ThreeBlockModel};
pub use trace::{IterationRecord, KktResiduals, SolverFailure, SolverTrace, Termination};

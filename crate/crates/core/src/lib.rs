//! Low-rank sparse subspace clustering with ℓ0-motivated regularizers.
//!
//! The crate provides two nonconvex ADMM solvers for the self-expressive
//! representation `X ≈ XC` (a GMC-penalized variant solved by firm
//! thresholding and a rank/ℓ0 variant solved by hard thresholding with a
//! proximal average), the convex nuclear + ℓ1 baseline and closed-form LRR,
//! plus everything needed to go from a data matrix to cluster labels:
//! affinity construction, normalized spectral clustering, clustering error
//! with optimal label matching, a union-of-subspaces data generator, and
//! plain-text matrix I/O.

// `!(x > 0.0)` deliberately rejects NaN; solver failures carry their trace.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

pub mod admm;
pub mod baselines;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod prox;
pub mod spectral;

pub use error::{Error, Result};

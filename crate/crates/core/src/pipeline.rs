//! End-to-end runs: representation, affinity, spectral clustering.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::admm::{
    gmc_lrssc_solve, s0l0_lrssc_solve, IterationRecord, SolverConfig, SolverFailure, SolverTrace,
    Termination, Variant,
};
use crate::baselines::{convex_lrssc, lrr_noiseless, lrr_noisy};
use crate::error::{invalid_param, Error};
use crate::spectral::{build_affinity, spectral_cluster, ClusterLabels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Gmc,
    S0L0,
    ConvexLrssc,
    Lrr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Gmc,
        Algorithm::S0L0,
        Algorithm::ConvexLrssc,
        Algorithm::Lrr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gmc => "gmc",
            Algorithm::S0L0 => "s0l0",
            Algorithm::ConvexLrssc => "lrssc-convex",
            Algorithm::Lrr => "lrr",
        }
    }

    /// The ADMM variant behind an iterative algorithm.
    pub fn variant(self) -> Option<Variant> {
        match self {
            Algorithm::Gmc => Some(Variant::Gmc),
            Algorithm::S0L0 => Some(Variant::S0L0),
            Algorithm::ConvexLrssc => Some(Variant::Convex),
            Algorithm::Lrr => None,
        }
    }

    /// Built-in solver defaults for this algorithm.
    pub fn default_config(self) -> SolverConfig {
        SolverConfig::default_for(self.variant().unwrap_or(Variant::Gmc))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                invalid_param(format!(
                    "unknown algorithm {s:?}; expected one of gmc, s0l0, lrssc-convex, lrr"
                ))
            })
    }
}

/// Everything an algorithm needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub solver: SolverConfig,
    /// LRR noise weight; `None` selects the noise-free closed form.
    pub lrr_lambda: Option<f64>,
}

impl RunSettings {
    pub fn defaults_for(algorithm: Algorithm) -> Self {
        Self {
            solver: algorithm.default_config(),
            lrr_lambda: None,
        }
    }
}

/// Computes the representation matrix and its trace.
///
/// LRR is closed form and reports a single converged row with no residuals.
pub fn representation(
    x: &DMatrix<f64>,
    algorithm: Algorithm,
    settings: &RunSettings,
) -> Result<(DMatrix<f64>, SolverTrace), SolverFailure> {
    match algorithm {
        Algorithm::Gmc => gmc_lrssc_solve(x, &settings.solver),
        Algorithm::S0L0 => s0l0_lrssc_solve(x, &settings.solver),
        Algorithm::ConvexLrssc => convex_lrssc(x, &settings.solver),
        Algorithm::Lrr => {
            let solution = match settings.lrr_lambda {
                Some(l) => lrr_noisy(x, l),
                None => lrr_noiseless(x),
            };
            let c = solution
                .map_err(|error| SolverFailure {
                    error,
                    partial: SolverTrace::new(),
                })?
                .c;
            let mut trace = SolverTrace::new();
            trace.records.push(IterationRecord {
                iter: 1,
                ..IterationRecord::default()
            });
            trace.termination = Termination::Converged;
            Ok((c, trace))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub labels: ClusterLabels,
    pub representation: DMatrix<f64>,
    pub trace: SolverTrace,
}

/// Runs `algorithm` on `x` and spectral-clusters `|C| + |C|ᵀ` into
/// `num_clusters` groups. Errors after the solver keep its full trace.
pub fn cluster(
    x: &DMatrix<f64>,
    num_clusters: usize,
    algorithm: Algorithm,
    settings: &RunSettings,
    seed: u64,
) -> Result<ClusterOutcome, SolverFailure> {
    let (c, trace) = representation(x, algorithm, settings)?;
    let labels = build_affinity(&c)
        .and_then(|w| spectral_cluster(&w, num_clusters, seed));
    match labels {
        Ok(labels) => Ok(ClusterOutcome {
            labels,
            representation: c,
            trace,
        }),
        Err(error) => Err(SolverFailure {
            error,
            partial: trace,
        }),
    }
}

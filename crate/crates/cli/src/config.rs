//! Solver settings: built-in defaults, then an optional TOML file, then flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use lrssc::pipeline::{Algorithm, RunSettings};
use serde::Deserialize;

/// Overrides for one configuration layer. The same keys are accepted as
/// flags (`--mu2-init 5`) and in the config file (`mu2_init = 5`).
///
/// Setting `lambda` without `tau` in a layer resets `tau` to `1 - lambda`.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFlags {
    /// Rank weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sparsity weight.
    #[arg(long)]
    pub tau: Option<f64>,
    /// GMC nonconvexity in (0, 1] (gmc only).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Penalty growth factor.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mu1_init: Option<f64>,
    #[arg(long)]
    pub mu2_init: Option<f64>,
    #[arg(long)]
    pub mu_max: Option<f64>,
    /// Stopping tolerance on the ∞-norm residuals.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Normalize the columns of J after each update.
    #[arg(long)]
    pub normalize_j: Option<bool>,
    /// Scale both weights by mu2_init (gmc, lrssc-convex).
    #[arg(long)]
    pub scale_by_mu: Option<bool>,
    /// LRR noise weight; omit for the noise-free closed form (lrr only).
    #[arg(long)]
    pub lrr_lambda: Option<f64>,
}

impl SolverFlags {
    fn touches_admm(&self) -> bool {
        self.lambda.is_some()
            || self.tau.is_some()
            || self.gamma.is_some()
            || self.rho.is_some()
            || self.mu1_init.is_some()
            || self.mu2_init.is_some()
            || self.mu_max.is_some()
            || self.epsilon.is_some()
            || self.max_iters.is_some()
            || self.normalize_j.is_some()
            || self.scale_by_mu.is_some()
    }

    fn check_against(&self, algorithm: Algorithm, origin: &str) -> Result<()> {
        if algorithm == Algorithm::Lrr && self.touches_admm() {
            bail!("{origin}: lrr is closed form and takes only lrr_lambda");
        }
        if algorithm != Algorithm::Lrr && self.lrr_lambda.is_some() {
            bail!("{origin}: lrr_lambda applies to the lrr algorithm only");
        }
        if algorithm != Algorithm::Gmc && self.gamma.is_some() {
            bail!("{origin}: gamma applies to the gmc algorithm only");
        }
        Ok(())
    }

    fn apply(&self, s: &mut RunSettings) {
        let c = &mut s.solver;
        if let Some(l) = self.lambda {
            c.lambda = l;
            c.tau = 1.0 - l;
        }
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        set!(tau, gamma, rho, mu1_init, mu2_init, mu_max, epsilon, max_iters, normalize_j, scale_by_mu);
        if self.lrr_lambda.is_some() {
            s.lrr_lambda = self.lrr_lambda;
        }
    }
}

pub fn load_file(path: &Path) -> Result<SolverFlags> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn resolve(algorithm: Algorithm, file: Option<&Path>, flags: &SolverFlags) -> Result<RunSettings> {
    let mut settings = RunSettings::defaults_for(algorithm);
    if let Some(path) = file {
        let layer = load_file(path)?;
        layer.check_against(algorithm, &path.display().to_string())?;
        layer.apply(&mut settings);
    }
    flags.check_against(algorithm, "flags")?;
    flags.apply(&mut settings);
    if let Some(variant) = algorithm.variant() {
        settings.solver.validate(variant)?;
    }
    Ok(settings)
}

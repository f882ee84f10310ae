use crate::error::{invalid_param, Result};

/// Which ADMM scheme a configuration is meant for. Validation rules differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Three-block scheme with firm thresholding (GMC-regularized).
    Gmc,
    /// Three-block scheme with soft thresholding (nuclear + ℓ1, convex).
    Convex,
    /// Two-block scheme with hard thresholding and a proximal average.
    S0L0,
}

/// Hyperparameters shared by every ADMM solver in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Rank weight.
    pub lambda: f64,
    /// Sparsity weight. The defaults keep `tau = 1 − lambda`.
    pub tau: f64,
    /// Nonconvexity of the GMC penalty, in `(0, 1]`. Ignored by the other variants.
    pub gamma: f64,
    /// Growth factor of the penalty parameters.
    pub rho: f64,
    pub mu1_init: f64,
    /// Initial penalty of the sparsity block; the two-block scheme's single μ⁰.
    pub mu2_init: f64,
    pub mu_max: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Rescale the columns of `J` to unit norm after each J-update.
    pub normalize_j: bool,
    /// Multiply both weights by `mu2_init` when forming thresholds.
    /// Only the three-block solvers honor this.
    pub scale_by_mu: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::gmc_default()
    }
}

impl SolverConfig {
    /// Defaults for the GMC and convex solvers: `lambda = 1/(1 + 0.1)`.
    pub fn gmc_default() -> Self {
        let lambda = lambda_from_alpha(0.1);
        Self {
            lambda,
            tau: 1.0 - lambda,
            gamma: 0.6,
            rho: 3.0,
            mu1_init: 0.1,
            mu2_init: 5.0,
            mu_max: 1e6,
            epsilon: 1e-4,
            max_iters: 100,
            normalize_j: true,
            scale_by_mu: true,
        }
    }

    pub fn s0l0_default() -> Self {
        Self {
            lambda: 0.5,
            tau: 0.5,
            ..Self::gmc_default()
        }
    }

    pub fn default_for(variant: Variant) -> Self {
        match variant {
            Variant::Gmc | Variant::Convex => Self::gmc_default(),
            Variant::S0L0 => Self::s0l0_default(),
        }
    }

    /// Sets `lambda` and ties `tau = 1 − lambda`.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self.tau = 1.0 - lambda;
        self
    }

    /// Rank and sparsity weights as they enter the thresholds.
    pub fn effective_weights(&self, variant: Variant) -> (f64, f64) {
        match variant {
            Variant::Gmc | Variant::Convex if self.scale_by_mu => {
                (self.lambda * self.mu2_init, self.tau * self.mu2_init)
            }
            _ => (self.lambda, self.tau),
        }
    }

    pub fn validate(&self, variant: Variant) -> Result<()> {
        let finite = [
            self.lambda,
            self.tau,
            self.gamma,
            self.rho,
            self.mu1_init,
            self.mu2_init,
            self.mu_max,
            self.epsilon,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(invalid_param("solver configuration contains a non-finite value"));
        }
        if !(self.rho > 1.0) {
            return Err(invalid_param(format!("rho must exceed 1, got {}", self.rho)));
        }
        if !(self.mu2_init > 0.0) {
            return Err(invalid_param(format!("mu2_init must be positive, got {}", self.mu2_init)));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid_param(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(invalid_param("max_iters must be at least 1"));
        }
        if self.mu_max < self.mu2_init {
            return Err(invalid_param("mu_max must not be below the initial penalties"));
        }
        match variant {
            Variant::Gmc | Variant::Convex => {
                if !(self.mu1_init > 0.0) || self.mu_max < self.mu1_init {
                    return Err(invalid_param(format!(
                        "mu1_init must lie in (0, mu_max], got {}",
                        self.mu1_init
                    )));
                }
                if !(self.lambda > 0.0 && self.lambda <= 1.0) {
                    return Err(invalid_param(format!(
                        "lambda must lie in (0, 1], got {}",
                        self.lambda
                    )));
                }
                if self.tau < 0.0 {
                    return Err(invalid_param(format!("tau must be nonnegative, got {}", self.tau)));
                }
                if variant == Variant::Gmc && !(self.gamma > 0.0 && self.gamma <= 1.0) {
                    return Err(invalid_param(format!(
                        "gamma must lie in (0, 1], got {}",
                        self.gamma
                    )));
                }
            }
            Variant::S0L0 => {
                if self.lambda < 0.0 || self.tau < 0.0 {
                    return Err(invalid_param("lambda and tau must be nonnegative"));
                }
                if (self.lambda + self.tau - 1.0).abs() > 1e-12 {
                    return Err(invalid_param(format!(
                        "lambda + tau must equal 1, got {} + {}",
                        self.lambda, self.tau
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Rank weight parameterized as `1 / (1 + alpha)`.
pub fn lambda_from_alpha(alpha: f64) -> f64 {
    1.0 / (1.0 + alpha)
}

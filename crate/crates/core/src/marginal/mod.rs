//! Unnormalized log marginal likelihoods and log posterior scores per model.
//!
//! The g-prior marginal is closed-form. The peMoM and piMoM marginals have no
//! closed form and are approximated by a Laplace expansion around the joint
//! mode of the coefficients (and the error variance, when it carries an
//! inverse-gamma prior). A tensor-product adaptive quadrature over the same
//! integrand serves as the validation oracle for models of up to two
//! coefficients. Reduced rlasso is scored through the same interface as a
//! penalized-likelihood comparator.

mod gprior;
mod laplace;
mod quadrature;
mod rlasso;

pub use gprior::{d_squared, gprior_log_marginal};
pub use laplace::{pemom_log_marginal_laplace, pimom_log_marginal_laplace};
pub use quadrature::{adaptive_log_integral, quadrature_log_marginal};
pub use rlasso::{asymptotic_penalty, reduced_rlasso_score};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::priors::{log_model_prior, ModelPrior, PriorFamily};

/// How the error variance enters a nonlocal-prior marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode {
    /// Condition on a fixed `σ²`.
    Known(f64),
    /// Integrate `σ²` against an inverse-gamma prior.
    InverseGamma { a0: f64, b0: f64 },
}

impl Default for SigmaMode {
    fn default() -> Self {
        SigmaMode::InverseGamma { a0: 0.1, b0: 0.1 }
    }
}

impl SigmaMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SigmaMode::Known(s) if s <= 0.0 || !s.is_finite() => {
                Err(Error::Domain(format!("known sigma2 must be positive, got {s}")))
            }
            SigmaMode::InverseGamma { a0, b0 } if a0 <= 0.0 || b0 <= 0.0 => Err(Error::Domain(
                format!("inverse-gamma parameters must be positive, got ({a0}, {b0})"),
            )),
            _ => Ok(()),
        }
    }
}

/// Controls for the Laplace mode search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub max_iter: usize,
    /// Convergence threshold on `‖∇f‖∞` at the mode.
    pub grad_tol: f64,
    /// Distance from zero to which OLS initial coefficients are clamped.
    /// `None` resolves to `(τ/n)^{1/4}`, the scale below which the nonlocal
    /// kernel dominates the likelihood.
    pub clamp_delta: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iter: 200,
            grad_tol: 1e-8,
            clamp_delta: None,
        }
    }
}

/// Everything needed to score a model: coefficient prior, model prior, the
/// σ² treatment, and optimizer controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorerConfig {
    pub prior: PriorFamily,
    pub model_prior: ModelPrior,
    pub sigma_mode: SigmaMode,
    pub optimizer: OptimizerConfig,
}

impl ScorerConfig {
    pub fn new(prior: PriorFamily, model_prior: ModelPrior) -> Self {
        ScorerConfig {
            prior,
            model_prior,
            sigma_mode: SigmaMode::default(),
            optimizer: OptimizerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.prior.validate()?;
        self.sigma_mode.validate()?;
        if self.optimizer.max_iter == 0 || self.optimizer.grad_tol <= 0.0 {
            return Err(Error::InvalidConfig(
                "optimizer needs max_iter >= 1 and grad_tol > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn qn(&self) -> usize {
        self.model_prior.qn()
    }
}

/// Result of a Laplace approximation to a nonlocal-prior marginal.
#[derive(Debug, Clone)]
pub struct LaplaceResult {
    pub log_marginal: f64,
    /// Mode coordinates: the coefficients, then `σ²` when it was optimized.
    pub mode: Vec<f64>,
    /// `log |V|` for the negative Hessian `V` of the objective at the mode.
    pub neg_hessian_log_det: f64,
    pub converged: bool,
}

/// Unnormalized log marginal likelihood of `k` under the configured prior.
///
/// For reduced rlasso this is the negated objective, so that larger remains
/// better across every family.
pub fn log_marginal(data: &Dataset, k: &Model, cfg: &ScorerConfig) -> Result<f64> {
    match cfg.prior {
        PriorFamily::Pemom { .. } => Ok(pemom_log_marginal_laplace(data, k, cfg)?.log_marginal),
        PriorFamily::Pimom { .. } => Ok(pimom_log_marginal_laplace(data, k, cfg)?.log_marginal),
        PriorFamily::GPrior { g } => gprior_log_marginal(data, k, g),
        PriorFamily::ReducedRlasso { tau } => Ok(-reduced_rlasso_score(data, k, tau)),
    }
}

/// Unnormalized log posterior score `log m_k(y) + log π(k)`.
///
/// Never panics and never returns an error: any failure inside the marginal
/// (singular Gram, non-convergence) demotes the model to `-inf` with a
/// logged warning so that a running search survives degenerate candidates.
pub fn log_posterior_score(data: &Dataset, k: &Model, cfg: &ScorerConfig) -> f64 {
    let prior = log_model_prior(&cfg.model_prior, k.size());
    if prior == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    match log_marginal(data, k, cfg) {
        Ok(m) => {
            let s = m + prior;
            if s.is_nan() {
                log::warn!("model {k} produced NaN score; treating as -inf");
                f64::NEG_INFINITY
            } else {
                s
            }
        }
        Err(err) => {
            log::warn!("model {k} scored as -inf: {err}");
            f64::NEG_INFINITY
        }
    }
}

pub(crate) const LN_2PI: f64 = 1.8378770664093453;

/// Exact log marginal of the empty model (pure Gaussian / inverse-gamma
/// integral; no approximation).
pub(crate) fn empty_model_log_marginal(data: &Dataset, sigma: &SigmaMode) -> f64 {
    let n = data.n() as f64;
    let yty = data.yty();
    match *sigma {
        SigmaMode::Known(s0) => -0.5 * n * (LN_2PI + s0.ln()) - yty / (2.0 * s0),
        SigmaMode::InverseGamma { a0, b0 } => {
            use statrs::function::gamma::ln_gamma;
            -0.5 * n * LN_2PI + a0 * b0.ln() - ln_gamma(a0) + ln_gamma(0.5 * n + a0)
                - (0.5 * n + a0) * (b0 + 0.5 * yty).ln()
        }
    }
}

//! Coefficient-prior log densities and model-space priors.
//!
//! Two nonlocal priors are supported, both vanishing at the origin:
//!
//! * peMoM, per-coefficient kernel `exp{-β²/(2σ²τ) - τ/β²}` with normalizer
//!   `C = (2πσ²τ)^{1/2} exp{-(2/σ²)^{1/2}}`;
//! * piMoM, kernel `β^{-2r} exp{-τ/β²}` with normalizer
//!   `C* = τ^{-r+1/2} Γ(r-1/2)`.
//!
//! Zellner's g-prior `N(0, gσ²(X_kᵀX_k)^{-1})` is the local-prior baseline.
//! Model-space priors are reported unnormalized; constant shifts cancel in
//! every posterior ratio.

use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, ModelGram};
use crate::model::Model;

const LN_2PI: f64 = 1.8378770664093453;

/// Which score drives model comparison. The first three are genuine priors;
/// reduced rlasso is a penalized-likelihood comparator scored through the
/// same pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorFamily {
    Pemom { tau: f64 },
    Pimom { tau: f64, r: u32 },
    GPrior { g: f64 },
    ReducedRlasso { tau: f64 },
}

impl PriorFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorFamily::Pemom { tau } | PriorFamily::ReducedRlasso { tau } => {
                if tau <= 0.0 || !tau.is_finite() {
                    return Err(Error::Domain(format!("tau must be positive, got {tau}")));
                }
            }
            PriorFamily::Pimom { tau, r } => {
                if tau <= 0.0 || !tau.is_finite() {
                    return Err(Error::Domain(format!("tau must be positive, got {tau}")));
                }
                if r < 1 {
                    return Err(Error::Domain(format!("piMoM order r must be >= 1, got {r}")));
                }
            }
            PriorFamily::GPrior { g } => {
                if g <= 0.0 || !g.is_finite() {
                    return Err(Error::Domain(format!("g must be positive, got {g}")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PriorFamily::Pemom { .. } => "pemom",
            PriorFamily::Pimom { .. } => "pimom",
            PriorFamily::GPrior { .. } => "gprior",
            PriorFamily::ReducedRlasso { .. } => "rlasso",
        }
    }
}

/// Default nonlocal scale `τ = log(n)·log(p)`.
pub fn default_tau(n: usize, p: usize) -> f64 {
    (n as f64).ln() * (p as f64).ln()
}

/// Prior over the model space, restricted to `|k| ≤ qn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelPrior {
    /// Uniform over all models of size at most `qn`.
    UniformRestricted { qn: usize },
    /// `π(k) ∝ ρ^{|k|}(1-ρ)^{p-|k|}` with `ρ` uniform, marginalized in
    /// closed form to `B(|k|+1, p-|k|+1)`.
    BetaBinomial { qn: usize, p: usize },
}

impl ModelPrior {
    pub fn qn(&self) -> usize {
        match *self {
            ModelPrior::UniformRestricted { qn } => qn,
            ModelPrior::BetaBinomial { qn, .. } => qn,
        }
    }
}

/// `log C` for the peMoM prior at the given variance and scale.
pub fn pemom_log_norm(sigma2: f64, tau: f64) -> f64 {
    0.5 * (LN_2PI + (sigma2 * tau).ln()) - (2.0 / sigma2).sqrt()
}

/// `log C*` for the piMoM prior. Exact for integer `r ≥ 1`.
pub fn pimom_log_norm(tau: f64, r: u32) -> f64 {
    (-(r as f64) + 0.5) * tau.ln() + ln_gamma(r as f64 - 0.5)
}

/// Log density of the peMoM prior at `beta`. Returns `-inf` whenever a
/// coordinate is exactly zero.
pub fn pemom_log_density(beta: &[f64], sigma2: f64, tau: f64) -> Result<f64> {
    if sigma2 <= 0.0 || tau <= 0.0 {
        return Err(Error::Domain("pemom needs sigma2 > 0 and tau > 0".into()));
    }
    let log_c = pemom_log_norm(sigma2, tau);
    let mut acc = 0.0;
    for &b in beta {
        if b == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += -b * b / (2.0 * sigma2 * tau) - tau / (b * b);
    }
    Ok(acc - beta.len() as f64 * log_c)
}

/// Log density of the piMoM prior at `beta`. `sigma2` is accepted for
/// interface symmetry with the peMoM prior and ignored: the density does not
/// depend on it.
pub fn pimom_log_density(beta: &[f64], _sigma2: f64, tau: f64, r: u32) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::Domain("pimom needs tau > 0".into()));
    }
    if r < 1 {
        return Err(Error::Domain(format!("pimom order r must be >= 1, got {r}")));
    }
    let log_c = pimom_log_norm(tau, r);
    let mut acc = 0.0;
    for &b in beta {
        if b == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += -2.0 * r as f64 * b.abs().ln() - tau / (b * b);
    }
    Ok(acc - beta.len() as f64 * log_c)
}

/// Log density of `N(0, gσ²(X_kᵀX_k)^{-1})` at `beta`.
pub fn gprior_log_density(
    beta: &[f64],
    sigma2: f64,
    g: f64,
    data: &Dataset,
    k: &Model,
) -> Result<f64> {
    if sigma2 <= 0.0 || g <= 0.0 {
        return Err(Error::Domain("gprior needs sigma2 > 0 and g > 0".into()));
    }
    if beta.len() != k.size() {
        return Err(Error::Domain("beta length != |k|".into()));
    }
    if k.is_empty() {
        return Ok(0.0);
    }
    let mg = ModelGram::new(data, k);
    let chol = mg
        .cholesky(0.0)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    // log|X'X| from the Cholesky diagonal; also a cheap conditioning guard.
    let diag: Vec<f64> = (0..k.size()).map(|i| chol.l_dirty()[(i, i)]).collect();
    let dmax = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(dmin > 0.0) || (dmax / dmin).powi(2) > linalg::SINGULAR_CONDITION {
        return Err(Error::SingularGram {
            cond: (dmax / dmin).powi(2),
        });
    }
    let log_det_gram = 2.0 * diag.iter().map(|d| d.ln()).sum::<f64>();
    let b = nalgebra::DVector::from_column_slice(beta);
    let quad = b.dot(&(&mg.gram * &b));
    let m = k.size() as f64;
    Ok(-0.5 * m * (LN_2PI + (g * sigma2).ln()) + 0.5 * log_det_gram - quad / (2.0 * g * sigma2))
}

/// Unnormalized log prior of a model of size `k_size`.
pub fn log_model_prior(prior: &ModelPrior, k_size: usize) -> f64 {
    match *prior {
        ModelPrior::UniformRestricted { qn } => {
            if k_size <= qn {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        ModelPrior::BetaBinomial { qn, p } => {
            if k_size > qn || k_size > p {
                f64::NEG_INFINITY
            } else {
                ln_beta(k_size as f64 + 1.0, (p - k_size) as f64 + 1.0)
            }
        }
    }
}

/// `log B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pemom_vanishes_at_origin() {
        assert_eq!(
            pemom_log_density(&[1.0, 0.0], 1.0, 1.0).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn pemom_normalizer_matches_quadrature_value() {
        // ∫ exp(-t²/2 - 1/t²) dt over |t| ≤ 40, adaptive-quadrature value
        // frozen from an independent oracle.
        let c_quad: f64 = 0.6094032805687575;
        assert_abs_diff_eq!(pemom_log_norm(1.0, 1.0), c_quad.ln(), epsilon = 1e-6);
    }

    #[test]
    fn pimom_normalizer_r1_is_sqrt_pi_at_unit_tau() {
        assert_abs_diff_eq!(
            pimom_log_norm(1.0, 1),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn pimom_vanishes_at_origin_and_validates() {
        assert_eq!(
            pimom_log_density(&[0.0], 1.0, 1.0, 1).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(pimom_log_density(&[1.0], 1.0, -1.0, 1).is_err());
        assert!(pimom_log_density(&[1.0], 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn nonlocal_densities_are_sign_symmetric() {
        let b1 = [0.7, -1.3, 2.1];
        let b2 = [-0.7, 1.3, -2.1];
        assert_abs_diff_eq!(
            pemom_log_density(&b1, 2.0, 3.0).unwrap(),
            pemom_log_density(&b2, 2.0, 3.0).unwrap(),
        );
        assert_abs_diff_eq!(
            pimom_log_density(&b1, 2.0, 3.0, 1).unwrap(),
            pimom_log_density(&b2, 2.0, 3.0, 1).unwrap(),
        );
    }

    #[test]
    fn nonlocal_densities_are_coordinate_additive() {
        let b = [0.5, -1.1];
        let joint = pemom_log_density(&b, 2.0, 3.0).unwrap();
        let split = pemom_log_density(&b[..1], 2.0, 3.0).unwrap()
            + pemom_log_density(&b[1..], 2.0, 3.0).unwrap();
        assert_abs_diff_eq!(joint, split, epsilon = 1e-12);

        let joint = pimom_log_density(&b, 1.0, 2.0, 2).unwrap();
        let split = pimom_log_density(&b[..1], 1.0, 2.0, 2).unwrap()
            + pimom_log_density(&b[1..], 1.0, 2.0, 2).unwrap();
        assert_abs_diff_eq!(joint, split, epsilon = 1e-12);
    }

    #[test]
    fn gprior_is_positive_at_origin_unlike_nonlocal() {
        let d = Dataset::from_columns(
            vec![1.0, -1.0, 0.5, 0.0],
            vec![vec![1.0, 2.0, 3.0, 4.0]],
        )
        .unwrap()
        .standardize()
        .unwrap();
        let k = Model::from_sorted(vec![0]);
        let at_zero = gprior_log_density(&[0.0], 1.0, 4.0, &d, &k).unwrap();
        assert!(at_zero.is_finite());
        // mode at the origin
        let off = gprior_log_density(&[0.3], 1.0, 4.0, &d, &k).unwrap();
        assert!(at_zero > off);
        // nonlocal contrast
        assert_eq!(
            pemom_log_density(&[0.0], 1.0, 4.0).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn gprior_scalar_variance_with_g_equal_n() {
        // 1 standardized column: X'X = n, so var = gσ²/n = σ² when g = n.
        let d = Dataset::from_columns(
            vec![1.0, -1.0, 0.5, 0.0],
            vec![vec![1.0, 2.0, 3.0, 4.0]],
        )
        .unwrap()
        .standardize()
        .unwrap();
        let k = Model::from_sorted(vec![0]);
        let n = d.n() as f64;
        let sigma2 = 1.7;
        let ld = gprior_log_density(&[0.4], sigma2, n, &d, &k).unwrap();
        let expect = -0.5 * (LN_2PI + sigma2.ln()) - 0.4f64.powi(2) / (2.0 * sigma2);
        assert_abs_diff_eq!(ld, expect, epsilon = 1e-10);
    }

    #[test]
    fn uniform_model_prior_is_flat_within_support() {
        let pr = ModelPrior::UniformRestricted { qn: 10 };
        assert_eq!(log_model_prior(&pr, 2), log_model_prior(&pr, 5));
        assert_eq!(log_model_prior(&pr, 11), f64::NEG_INFINITY);
    }

    #[test]
    fn beta_binomial_hand_values() {
        // p=3: |k|=0 -> log B(1,4) = log(1/4); |k|=1 -> log B(2,3) = log(1/12).
        let pr = ModelPrior::BetaBinomial { qn: 3, p: 3 };
        assert_abs_diff_eq!(log_model_prior(&pr, 0), (1.0f64 / 4.0).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(log_model_prior(&pr, 1), (1.0f64 / 12.0).ln(), epsilon = 1e-12);
        assert_eq!(log_model_prior(&pr, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn beta_binomial_decreases_up_to_half_p() {
        for p in 4..=100usize {
            let pr = ModelPrior::BetaBinomial { qn: p, p };
            let mut prev = log_model_prior(&pr, 0);
            for k in 1..=(p / 2) {
                let cur = log_model_prior(&pr, k);
                assert!(cur < prev, "p={p} k={k}");
                prev = cur;
            }
        }
    }
}

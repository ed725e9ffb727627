//! Reduced reciprocal-lasso comparator and the asymptotic penalty diagnostic.

use crate::data::Dataset;
use crate::linalg::ols_fit;
use crate::model::Model;

/// Reduced rlasso objective evaluated at the least-squares estimate:
/// `R*_k + Σ_j τ/|β̂_j|`. Lower is better (this is a loss, not a log score).
/// Degenerate fits (singular Gram, exactly-zero coefficients) map to `+inf`.
pub fn reduced_rlasso_score(data: &Dataset, k: &Model, tau: f64) -> f64 {
    if k.is_empty() {
        return data.yty();
    }
    let fit = match ols_fit(data, k) {
        Ok(f) => f,
        Err(_) => return f64::INFINITY,
    };
    let mut penalty = 0.0;
    for &b in &fit.beta {
        if b == 0.0 {
            return f64::INFINITY;
        }
        penalty += tau / b.abs();
    }
    fit.rss + penalty
}

/// Asymptotic per-coefficient penalty of the nonlocal marginal likelihood:
/// `√(nτu_k)` below the threshold `c(nu_k/τ)^{-1/4}` and `τ/β̂²` above it.
/// A diagnostic only; never enters scoring. The threshold constant `c` is
/// unspecified upstream and defaults to 1.
pub fn asymptotic_penalty(beta_hat_j: f64, tau: f64, n: usize, u_k: f64, c: f64) -> f64 {
    let nf = n as f64;
    let threshold = c * (nf * u_k / tau).powf(-0.25);
    if beta_hat_j.abs() < threshold {
        (nf * tau * u_k).sqrt()
    } else {
        tau / (beta_hat_j * beta_hat_j)
    }
}

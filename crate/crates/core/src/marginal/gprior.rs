//! Closed-form g-prior marginal likelihood.
//!
//! With `β_k | k, σ² ~ N(0, g σ² (X_kᵀX_k)^{-1})` and the Jeffreys prior
//! `π(σ²) ∝ 1/σ²` (intercept handled by centering), the marginal is
//! proportional to `(1+g)^{-|k|/2} {1 + g(1 - D_k²)}^{-(n-1)/2}` where
//! `D_k²` is the ordinary coefficient of determination of model `k`.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, ModelGram};
use crate::model::Model;

/// Coefficient of determination `D_k² = 1 − R*_k / yᵀy` on the centered
/// response. The empty model has `D² = 0`.
pub fn d_squared(data: &Dataset, k: &Model) -> Result<f64> {
    if k.is_empty() {
        return Ok(0.0);
    }
    let mg = ModelGram::new(data, k);
    let chol = mg
        .cholesky(0.0)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    let l = chol.l_dirty();
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for i in 0..k.size() {
        dmin = dmin.min(l[(i, i)]);
        dmax = dmax.max(l[(i, i)]);
    }
    let cond = (dmax / dmin).powi(2);
    if !(dmin > 0.0) || cond > linalg::SINGULAR_CONDITION {
        return Err(Error::SingularGram { cond });
    }
    let beta = chol.solve(&mg.xty);
    let rss = mg.rss_at(&beta);
    // Projection keeps rss within [0, yty]; clamp away rounding noise.
    let d2 = 1.0 - (rss / mg.yty).clamp(0.0, 1.0);
    Ok(d2)
}

/// `-(|k|/2)·log(1+g) - ((n-1)/2)·log{1 + g(1 - D_k²)}`, dropping the
/// model-independent constant.
pub fn gprior_log_marginal(data: &Dataset, k: &Model, g: f64) -> Result<f64> {
    if g <= 0.0 || !g.is_finite() {
        return Err(Error::Domain(format!("g must be positive, got {g}")));
    }
    if k.size() + 1 > data.n() {
        return Err(Error::Domain(format!(
            "model size {} exceeds n-1 = {}",
            k.size(),
            data.n() - 1
        )));
    }
    let d2 = d_squared(data, k)?;
    let n = data.n() as f64;
    let m = k.size() as f64;
    Ok(-0.5 * m * (1.0 + g).ln() - 0.5 * (n - 1.0) * (1.0 + g * (1.0 - d2)).ln())
}

//! Per-model least-squares and ridge algebra.
//!
//! Every solve works in the |k|-dimensional coefficient space through the
//! model's Gram matrix `X_kᵀX_k`; nothing of size `p` is ever formed. This is
//! what makes scoring viable when `p ≫ n`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::Model;

/// Condition-number ceiling beyond which a Gram matrix is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Eigenvalue floor for [`gram_spectrum`].
pub const SPECTRUM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum FitKind {
    Ols,
    Ridge { tau: f64 },
}

/// A per-model coefficient fit with its residual.
#[derive(Debug, Clone)]
pub struct Fit {
    /// Coefficients in the order of the model's indices.
    pub beta: Vec<f64>,
    /// `‖y − X_k·beta‖²`: `R*_k` for OLS, the ridge analogue otherwise.
    pub rss: f64,
    /// `y − X_k·beta`.
    pub residual: Vec<f64>,
    pub kind: FitKind,
}

/// Extreme eigenvalues of `X_kᵀX_k / n`.
#[derive(Debug, Clone, Copy)]
pub struct GramSpectrum {
    pub nu_min: f64,
    pub nu_max: f64,
    /// Representative eigenvalue used by diagnostics; defaults to `nu_min`.
    pub u_k: f64,
}

/// The sufficient statistics of a model: `X_kᵀX_k`, `X_kᵀy`, `yᵀy`.
///
/// Scoring touches these and nothing else, so a candidate model costs
/// `O(n·|k|²)` to set up and `O(|k|³)` per solve.
#[derive(Debug, Clone)]
pub struct ModelGram {
    pub gram: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub yty: f64,
}

impl ModelGram {
    pub fn new(data: &Dataset, k: &Model) -> Self {
        let m = k.size();
        let n = data.n();
        let mut gram = DMatrix::zeros(m, m);
        let mut xty = DVector::zeros(m);
        let cols: Vec<&[f64]> = k.iter().map(|j| data.col(j)).collect();
        for a in 0..m {
            let ca = cols[a];
            xty[a] = dot(ca, data.y());
            for b in a..m {
                let v = dot(ca, cols[b]);
                gram[(a, b)] = v;
                gram[(b, a)] = v;
            }
        }
        debug_assert_eq!(cols.len(), m);
        let _ = n;
        ModelGram {
            gram,
            xty,
            yty: data.yty(),
        }
    }

    /// Cholesky of `X_kᵀX_k + ridge·I`. `None` when the shifted Gram is not
    /// positive definite.
    pub fn cholesky(&self, ridge: f64) -> Option<Cholesky<f64, nalgebra::Dyn>> {
        let mut a = self.gram.clone();
        if ridge != 0.0 {
            for i in 0..a.nrows() {
                a[(i, i)] += ridge;
            }
        }
        Cholesky::new(a)
    }

    /// `‖y − X_kβ‖²` from the sufficient statistics alone.
    pub fn rss_at(&self, beta: &DVector<f64>) -> f64 {
        let gb = &self.gram * beta;
        self.yty - 2.0 * beta.dot(&self.xty) + beta.dot(&gb)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual_of(data: &Dataset, k: &Model, beta: &[f64]) -> Vec<f64> {
    let mut r = data.y().to_vec();
    for (idx, j) in k.iter().enumerate() {
        let c = data.col(j);
        let b = beta[idx];
        for (ri, ci) in r.iter_mut().zip(c) {
            *ri -= b * ci;
        }
    }
    r
}

/// Ordinary least squares on the columns of `k`.
///
/// The empty model yields an empty coefficient vector and `rss = yᵀy`.
/// Errors with [`Error::SingularGram`] when the Gram condition number
/// exceeds [`SINGULAR_CONDITION`].
pub fn ols_fit(data: &Dataset, k: &Model) -> Result<Fit> {
    if k.size() + 1 > data.n() {
        return Err(Error::Domain(format!(
            "model size {} exceeds n-1 = {}",
            k.size(),
            data.n() - 1
        )));
    }
    if k.is_empty() {
        return Ok(Fit {
            beta: Vec::new(),
            rss: data.yty(),
            residual: data.y().to_vec(),
            kind: FitKind::Ols,
        });
    }
    let mg = ModelGram::new(data, k);
    check_condition(&mg.gram)?;
    let chol = mg
        .cholesky(0.0)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    let beta = chol.solve(&mg.xty);
    let residual = residual_of(data, k, beta.as_slice());
    let rss = residual.iter().map(|v| v * v).sum();
    Ok(Fit {
        beta: beta.as_slice().to_vec(),
        rss,
        residual,
        kind: FitKind::Ols,
    })
}

/// Ridge regression with penalty `1/tau`: solves
/// `(X_kᵀX_k + I/τ) β = X_kᵀy`. Always well posed for `τ > 0`.
pub fn ridge_fit(data: &Dataset, k: &Model, tau: f64) -> Result<Fit> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::Domain(format!("ridge tau must be positive, got {tau}")));
    }
    if k.is_empty() {
        return Ok(Fit {
            beta: Vec::new(),
            rss: data.yty(),
            residual: data.y().to_vec(),
            kind: FitKind::Ridge { tau },
        });
    }
    let mg = ModelGram::new(data, k);
    let chol = mg
        .cholesky(1.0 / tau)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    let beta = chol.solve(&mg.xty);
    let residual = residual_of(data, k, beta.as_slice());
    let rss = residual.iter().map(|v| v * v).sum();
    Ok(Fit {
        beta: beta.as_slice().to_vec(),
        rss,
        residual,
        kind: FitKind::Ridge { tau },
    })
}

/// Extreme eigenvalues of `X_kᵀX_k / n` for a nonempty model.
pub fn gram_spectrum(data: &Dataset, k: &Model) -> Result<GramSpectrum> {
    if k.is_empty() {
        return Err(Error::Domain("gram spectrum needs |k| >= 1".into()));
    }
    let mg = ModelGram::new(data, k);
    let scaled = &mg.gram / data.n() as f64;
    let eigen = scaled.symmetric_eigenvalues();
    let nu_min = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    let nu_max = eigen.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if nu_min < SPECTRUM_FLOOR {
        return Err(Error::SingularGram {
            cond: nu_max / nu_min.max(f64::MIN_POSITIVE),
        });
    }
    Ok(GramSpectrum {
        nu_min,
        nu_max,
        u_k: nu_min,
    })
}

fn check_condition(gram: &DMatrix<f64>) -> Result<()> {
    let eigen = gram.symmetric_eigenvalues();
    let max = eigen.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || max / min > SINGULAR_CONDITION {
        return Err(Error::SingularGram {
            cond: if min > 0.0 { max / min } else { f64::INFINITY },
        });
    }
    Ok(())
}

//! Response/design containers and the standardization step.
//!
//! All scoring assumes the convention: covariate columns centered to mean 0
//! and rescaled so that each column's squared norm equals `n`, with the
//! response centered (no explicit intercept). That makes the screening
//! statistic comparable across columns and keeps coefficients of
//! determination well defined.

use crate::error::{Error, Result};

/// A regression dataset with the design stored column-major.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: Vec<f64>,
    /// Column-major `n * p` storage; column `j` occupies `[j*n, (j+1)*n)`.
    x: Vec<f64>,
    n: usize,
    p: usize,
    standardized: bool,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
    y_mean: f64,
}

impl Dataset {
    /// Build a raw (unstandardized) dataset from a response and a
    /// column-major design. Rejects non-finite entries and degenerate shapes.
    pub fn from_parts(y: Vec<f64>, x: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n < 2 || p < 1 {
            return Err(Error::Domain(format!("need n >= 2 and p >= 1, got n={n}, p={p}")));
        }
        if y.len() != n || x.len() != n * p {
            return Err(Error::Domain("shape mismatch between y, X, n, p".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        Ok(Dataset {
            y,
            x,
            n,
            p,
            standardized: false,
            column_means: vec![0.0; p],
            column_scales: vec![1.0; p],
            y_mean: 0.0,
        })
    }

    /// Build from per-column vectors.
    pub fn from_columns(y: Vec<f64>, cols: Vec<Vec<f64>>) -> Result<Self> {
        let n = y.len();
        let p = cols.len();
        let mut x = Vec::with_capacity(n * p);
        for c in &cols {
            if c.len() != n {
                return Err(Error::Domain("column length != n".into()));
            }
            x.extend_from_slice(c);
        }
        Self::from_parts(y, x, n, p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.x[j * self.n..(j + 1) * self.n]
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Mean removed from the response during standardization.
    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    /// `yᵀy` of the stored (centered, when standardized) response.
    pub fn yty(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum()
    }

    /// Center every column to mean 0, rescale to squared norm `n`, and
    /// center the response. Records the applied transform so predictions can
    /// be mapped back to the raw scale. Errors on any zero-variance column.
    pub fn standardize(&self) -> Result<Dataset> {
        let n = self.n;
        let nf = n as f64;
        let mut x = self.x.clone();
        let mut means = vec![0.0; self.p];
        let mut scales = vec![0.0; self.p];

        for j in 0..self.p {
            let col = &mut x[j * n..(j + 1) * n];
            let mean = col.iter().sum::<f64>() / nf;
            let mut ss = 0.0;
            for v in col.iter_mut() {
                *v -= mean;
                ss += *v * *v;
            }
            // Variance threshold is relative to the column's magnitude.
            if ss / nf <= 1e-20 * (1.0 + mean * mean) {
                return Err(Error::ConstantColumn(j));
            }
            let scale = (ss / nf).sqrt();
            for v in col.iter_mut() {
                *v /= scale;
            }
            // Compose with any transform already applied upstream.
            means[j] = self.column_means[j] + mean * self.column_scales[j];
            scales[j] = self.column_scales[j] * scale;
        }

        let y_shift = self.y.iter().sum::<f64>() / nf;
        let y: Vec<f64> = self.y.iter().map(|v| v - y_shift).collect();

        Ok(Dataset {
            y,
            x,
            n,
            p: self.p,
            standardized: true,
            column_means: means,
            column_scales: scales,
            y_mean: self.y_mean + y_shift,
        })
    }
}

/// Free-function alias for [`Dataset::standardize`].
pub fn standardize(raw: &Dataset) -> Result<Dataset> {
    raw.standardize()
}

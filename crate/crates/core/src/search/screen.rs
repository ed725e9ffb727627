//! Residual-correlation screening.
//!
//! Candidate additions are restricted to the columns most correlated with
//! the current model's residual, measured by `|r_kᵀX_j|` on standardized
//! columns. This is what keeps the S5 per-step cost independent of `p`.

use crate::data::Dataset;
use crate::model::Model;

/// The screened column set: the current model's own columns plus the top-Mn
/// outside columns by `|r_kᵀX_j|`.
#[derive(Debug, Clone)]
pub struct ScreenSet {
    indices: Vec<u32>,
}

impl ScreenSet {
    /// Sorted ascending; contains every index of the originating model.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: u32) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

/// Compute `k ∪ argtop-Mn_{j ∉ k} |residualᵀX_j|`, breaking score ties by
/// ascending column index.
pub fn screen(data: &Dataset, residual: &[f64], k: &Model, mn: usize) -> ScreenSet {
    assert_eq!(residual.len(), data.n());
    let mut stats: Vec<(f64, u32)> = Vec::with_capacity(data.p() - k.size());
    for j in 0..data.p() as u32 {
        if k.contains(j) {
            continue;
        }
        let col = data.col(j as usize);
        let dot: f64 = residual.iter().zip(col).map(|(r, x)| r * x).sum();
        stats.push((dot.abs(), j));
    }
    stats.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    stats.truncate(mn);

    let mut indices: Vec<u32> = k.indices().to_vec();
    indices.extend(stats.iter().map(|&(_, j)| j));
    indices.sort_unstable();
    ScreenSet { indices }
}

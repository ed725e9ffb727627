//! Models as canonical index sets, and the neighborhood structure the
//! stochastic searches walk on.
//!
//! A model is the set of covariate columns included in the regression. The
//! index list is kept sorted and duplicate-free so that equality and hashing
//! are structural: two models are the same iff they select the same columns.

use crate::error::{Error, Result};

/// A candidate model: a sorted, strictly increasing set of column indices.
///
/// Indices are 0-based everywhere, including reports. Stored as `u32` since
/// ledgers can hold millions of models.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model(Vec<u32>);

impl Model {
    /// The empty model (no covariates).
    pub fn empty() -> Self {
        Model(Vec::new())
    }

    /// Build a model from arbitrary indices; sorts and rejects duplicates.
    pub fn new(mut indices: Vec<u32>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("duplicate index in model".into()));
        }
        Ok(Model(indices))
    }

    /// Build from indices already known to be sorted and strictly increasing.
    pub fn from_sorted(indices: Vec<u32>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Model(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: u32) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// The model with column `j` added. `j` must not already be present.
    pub fn with_added(&self, j: u32) -> Model {
        let pos = self.0.binary_search(&j).unwrap_err();
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0[..pos]);
        v.push(j);
        v.extend_from_slice(&self.0[pos..]);
        Model(v)
    }

    /// The model with column `j` removed. `j` must be present.
    pub fn with_removed(&self, j: u32) -> Model {
        let pos = self.0.binary_search(&j).unwrap();
        let mut v = self.0.clone();
        v.remove(pos);
        Model(v)
    }

    /// The model with `j` (present) replaced by `l` (absent).
    pub fn with_swapped(&self, j: u32, l: u32) -> Model {
        self.with_removed(j).with_added(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&j| j as usize)
    }
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// The one-change neighborhood of a model: single-column additions,
/// deletions, and swaps.
#[derive(Debug, Clone, Default)]
pub struct Neighborhood {
    /// `k ∪ {j}` for every `j ∉ k`, omitted entirely when `|k| = qn`.
    pub additions: Vec<Model>,
    /// `k ∖ {j}` for every `j ∈ k`.
    pub deletions: Vec<Model>,
    /// `(k ∖ {j}) ∪ {l}` for every `j ∈ k`, `l ∉ k`.
    pub swaps: Vec<Model>,
}

/// Enumerate the full neighborhood of `k` over `p` columns under the size
/// cap `qn`. Additions are suppressed once `|k| = qn` so that no candidate
/// ever exceeds the prior's support.
pub fn neighborhood(k: &Model, p: usize, qn: usize) -> Neighborhood {
    assert!(k.size() <= qn, "current model exceeds the size cap");
    let mut nbd = Neighborhood::default();

    let absent: Vec<u32> = (0..p as u32).filter(|&j| !k.contains(j)).collect();

    if k.size() + 1 <= qn {
        nbd.additions = absent.iter().map(|&j| k.with_added(j)).collect();
    }
    nbd.deletions = k.indices().iter().map(|&j| k.with_removed(j)).collect();
    nbd.swaps = Vec::with_capacity(k.size() * absent.len());
    for &j in k.indices() {
        for &l in &absent {
            nbd.swaps.push(k.with_swapped(j, l));
        }
    }
    nbd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_rejects_duplicates_and_sorts() {
        let m = Model::new(vec![3, 1, 2]).unwrap();
        assert_eq!(m.indices(), &[1, 2, 3]);
        assert!(Model::new(vec![1, 1]).is_err());
    }

    #[test]
    fn equality_is_structural() {
        let a = Model::new(vec![2, 0]).unwrap();
        let b = Model::from_sorted(vec![0, 2]);
        assert_eq!(a, b);
        assert_ne!(a, Model::from_sorted(vec![0, 1]));
    }

    #[test]
    fn add_remove_swap() {
        let m = Model::from_sorted(vec![1, 4]);
        assert_eq!(m.with_added(2).indices(), &[1, 2, 4]);
        assert_eq!(m.with_removed(1).indices(), &[4]);
        assert_eq!(m.with_swapped(4, 0).indices(), &[0, 1]);
    }

    #[test]
    fn neighborhood_of_empty_model() {
        let nbd = neighborhood(&Model::empty(), 3, 3);
        let singles: Vec<_> = nbd.additions.iter().map(|m| m.indices()[0]).collect();
        assert_eq!(singles, vec![0, 1, 2]);
        assert!(nbd.deletions.is_empty());
        assert!(nbd.swaps.is_empty());
    }

    #[test]
    fn neighborhood_counts_single_column() {
        let k = Model::from_sorted(vec![0]);
        let nbd = neighborhood(&k, 3, 3);
        assert_eq!(nbd.additions.len(), 2);
        assert_eq!(nbd.deletions.len(), 1);
        assert_eq!(nbd.swaps.len(), 2);
    }

    #[test]
    fn additions_suppressed_at_size_cap() {
        let k = Model::from_sorted(vec![0, 1]);
        let nbd = neighborhood(&k, 5, 2);
        assert!(nbd.additions.is_empty());
        assert_eq!(nbd.deletions.len(), 2);
        assert_eq!(nbd.swaps.len(), 2 * 3);
    }

    #[test]
    fn neighborhood_cardinalities_match_closed_form() {
        // |Γ+| = p-|k| (or 0 at the cap), |Γ-| = |k|, |Γ0| = |k|(p-|k|).
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..100 {
            let p = 2 + (next() % 30) as usize;
            let qn = 1 + (next() % p as u64) as usize;
            let size = (next() % (qn as u64 + 1)) as usize;
            let mut idx: Vec<u32> = (0..p as u32).collect();
            // partial shuffle
            for i in 0..size {
                let j = i + (next() as usize) % (p - i);
                idx.swap(i, j);
            }
            let k = Model::new(idx[..size].to_vec()).unwrap();
            let nbd = neighborhood(&k, p, qn);
            let expected_add = if size < qn { p - size } else { 0 };
            assert_eq!(nbd.additions.len(), expected_add);
            assert_eq!(nbd.deletions.len(), size);
            assert_eq!(nbd.swaps.len(), size * (p - size));
        }
    }
}

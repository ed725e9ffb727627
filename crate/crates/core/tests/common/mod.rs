//! Shared helpers for the integration and acceptance suites.
#![allow(dead_code)]

use s5_core::marginal::{log_posterior_score, ScorerConfig};
use s5_core::{Dataset, Model};

/// Every model of size at most `qn` over `p` columns, in lexicographic
/// order. Only sane for tiny `p`.
pub fn enumerate_models(p: usize, qn: usize) -> Vec<Model> {
    let mut all = vec![Model::empty()];
    let mut frontier = vec![Model::empty()];
    for _ in 0..qn {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.indices().last().map(|&j| j + 1).unwrap_or(0);
            for j in start..p as u32 {
                let bigger = m.with_added(j);
                next.push(bigger.clone());
                all.push(bigger);
            }
        }
        frontier = next;
    }
    all
}

/// Exhaustively score the restricted model space and return the MAP
/// (ties toward the lexicographically smaller model) plus everything scored.
pub fn exhaustive_map(data: &Dataset, cfg: &ScorerConfig, qn: usize) -> (Model, Vec<(Model, f64)>) {
    let mut scored: Vec<(Model, f64)> = enumerate_models(data.p(), qn)
        .into_iter()
        .map(|m| {
            let s = log_posterior_score(data, &m, cfg);
            (m, s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    (scored[0].0.clone(), scored)
}

/// Exhaustive log normalizer over the scored space.
pub fn exhaustive_log_norm(scored: &[(Model, f64)]) -> f64 {
    let m = scored
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    m + scored
        .iter()
        .map(|(_, s)| (s - m).exp())
        .sum::<f64>()
        .ln()
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn enumeration_count_matches_binomial_sums() {
        // Σ_{d≤4} C(10,d) = 1 + 10 + 45 + 120 + 210 = 386
        assert_eq!(enumerate_models(10, 4).len(), 386);
        assert_eq!(enumerate_models(3, 3).len(), 8);
    }
}

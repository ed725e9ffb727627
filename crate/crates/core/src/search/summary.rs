//! Posterior summaries over a search ledger.
//!
//! The ledger's unnormalized scores are normalized over the visited models
//! only; the result approximates posterior model probabilities from below
//! and becomes exact once the ledger covers the full support.

use crate::error::{Error, Result};
use crate::model::Model;

use super::{sample::log_sum_exp, Ledger};

/// Ledger-normalized posterior approximation.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    map_model: Model,
    map_score: f64,
    log_norm: f64,
    odds_count: usize,
    odds_floor: f64,
}

impl PosteriorSummary {
    /// The maximum a posteriori model over the ledger (score ties broken by
    /// lexicographically smallest index list).
    pub fn map_model(&self) -> &Model {
        &self.map_model
    }

    pub fn map_score(&self) -> f64 {
        self.map_score
    }

    /// Ledger-normalized probability of the MAP model.
    pub fn map_prob(&self) -> f64 {
        (self.map_score - self.log_norm).exp()
    }

    /// `log Σ_k exp(score_k)` over the whole ledger.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// Number of models whose posterior odds against the MAP exceed the
    /// floor passed to [`posterior_summary`].
    pub fn odds_count(&self) -> usize {
        self.odds_count
    }

    pub fn odds_floor(&self) -> f64 {
        self.odds_floor
    }

    /// Ledger-normalized probability of `k` (0 when never scored).
    pub fn prob_of(&self, ledger: &Ledger, k: &Model) -> f64 {
        match ledger.score_of(k) {
            Some(s) if s > f64::NEG_INFINITY => (s - self.log_norm).exp(),
            _ => 0.0,
        }
    }

    /// The `n` most probable models, highest first; probability ties break
    /// toward the lexicographically smaller model.
    pub fn top(&self, ledger: &Ledger, n: usize) -> Vec<(Model, f64)> {
        let mut all: Vec<(Model, f64)> = ledger
            .iter()
            .filter(|(_, s)| *s > f64::NEG_INFINITY)
            .map(|(m, s)| (m.clone(), (s - self.log_norm).exp()))
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(n);
        all
    }
}

/// Summarize a ledger: MAP model, normalization constant over visited
/// models, and the count of models with posterior odds against the MAP
/// above `odds_floor`.
pub fn posterior_summary(ledger: &Ledger, odds_floor: f64) -> Result<PosteriorSummary> {
    let mut best: Option<(&Model, f64)> = None;
    let mut scores = Vec::with_capacity(ledger.len());
    for (m, s) in ledger.iter() {
        scores.push(s);
        if s == f64::NEG_INFINITY {
            continue;
        }
        best = match best {
            None => Some((m, s)),
            Some((bm, bs)) => {
                if s > bs || (s == bs && m < bm) {
                    Some((m, s))
                } else {
                    Some((bm, bs))
                }
            }
        };
    }
    let (map_model, map_score) = best.ok_or(Error::EmptyLedger)?;
    let log_norm = log_sum_exp(&scores);
    let log_floor = odds_floor.ln();
    let odds_count = scores
        .iter()
        .filter(|s| **s > f64::NEG_INFINITY && **s - map_score > log_floor)
        .count();
    Ok(PosteriorSummary {
        map_model: map_model.clone(),
        map_score,
        log_norm,
        odds_count,
        odds_floor,
    })
}

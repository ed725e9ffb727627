//! Stochastic exploration of the model space.
//!
//! Two searches share one skeleton: score a candidate neighborhood of the
//! current model, sample one finalist per neighborhood component with
//! probability proportional to `π(k|y)^{1/t}`, then sample the next model
//! among the finalists. SSS scores the full one-change neighborhood at
//! `t = 1`; S5 drops swaps, restricts additions to a screened column set,
//! and anneals `t` down a decreasing temperature schedule.
//!
//! Every distinct model is scored exactly once per run; the [`Ledger`]
//! doubles as the score cache and as the record from which posterior model
//! probabilities are approximated.

mod sample;
mod screen;
mod summary;

mod s5;
mod sss;

pub use sample::{log_sum_exp, sample_tempered};
pub use screen::{screen, ScreenSet};
pub use summary::{posterior_summary, PosteriorSummary};

pub use s5::run_s5;
pub use sss::run_sss;
#[doc(hidden)]
pub use sss::run_sss_with_swaps;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Model;

/// Anything that can score a model; higher is better, `-inf` means
/// unsupported or degenerate. Must be pure: the ledger assumes one model has
/// one score.
pub trait ModelScorer: Sync {
    fn score(&self, k: &Model) -> f64;
}

impl<F: Fn(&Model) -> f64 + Sync> ModelScorer for F {
    fn score(&self, k: &Model) -> f64 {
        self(k)
    }
}

/// Residual used for the screening statistic `|r_kᵀX_j|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScreenResidual {
    /// Least-squares residual of the current model (default).
    Ols,
    /// Ridge residual with the given `τ`; useful when candidates are
    /// frequently collinear.
    Ridge(f64),
}

impl Default for ScreenResidual {
    fn default() -> Self {
        ScreenResidual::Ols
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    /// Shotgun stochastic search visiting `steps` models (`steps - 1`
    /// transitions).
    Sss { steps: usize },
    /// Simplified shotgun stochastic search with screening:
    /// `iterations_per_level - 1` transitions at each temperature.
    S5 {
        iterations_per_level: usize,
        screen_size: usize,
        /// Strictly decreasing, positive temperatures; its length is the
        /// number of levels.
        schedule: Vec<f64>,
    },
}

/// Geometric temperature descent from `t_hi` to `t_lo` over `levels` levels.
/// Ending at `t_lo = 1` makes the final sweep sample the untempered
/// posterior, which keeps the ledger-based posterior approximation honest.
pub fn geometric_schedule(levels: usize, t_hi: f64, t_lo: f64) -> Vec<f64> {
    assert!(levels >= 1 && t_hi >= t_lo && t_lo > 0.0);
    if levels == 1 {
        return vec![t_lo];
    }
    let ratio = (t_lo / t_hi).powf(1.0 / (levels - 1) as f64);
    (0..levels).map(|l| t_hi * ratio.powi(l as i32)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    /// Hard cap on model size; candidates beyond it are never constructed.
    pub qn: usize,
    pub seed: u64,
    pub screen_residual: ScreenResidual,
}

impl SearchConfig {
    pub fn sss(steps: usize, qn: usize, seed: u64) -> Self {
        SearchConfig {
            algorithm: Algorithm::Sss { steps },
            qn,
            seed,
            screen_residual: ScreenResidual::default(),
        }
    }

    /// S5 with the defaults `J = L = 20`, `Mn = 20` and a geometric schedule
    /// from 3 down to 1.
    pub fn s5_default(qn: usize, seed: u64) -> Self {
        SearchConfig {
            algorithm: Algorithm::S5 {
                iterations_per_level: 20,
                screen_size: 20,
                schedule: geometric_schedule(20, 3.0, 1.0),
            },
            qn,
            seed,
            screen_residual: ScreenResidual::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qn == 0 {
            return Err(Error::InvalidConfig("qn must be at least 1".into()));
        }
        match &self.algorithm {
            Algorithm::Sss { steps } => {
                if *steps == 0 {
                    return Err(Error::InvalidConfig("SSS needs steps >= 1".into()));
                }
            }
            Algorithm::S5 {
                iterations_per_level,
                screen_size,
                schedule,
            } => {
                if *iterations_per_level == 0 {
                    return Err(Error::InvalidConfig("S5 needs J >= 1".into()));
                }
                if *screen_size == 0 {
                    return Err(Error::InvalidConfig("S5 needs Mn >= 1".into()));
                }
                if schedule.is_empty() {
                    return Err(Error::InvalidConfig("S5 needs a nonempty schedule".into()));
                }
                if schedule.iter().any(|t| !(*t > 0.0)) {
                    return Err(Error::InvalidConfig("temperatures must be positive".into()));
                }
                if schedule.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(Error::InvalidConfig(
                        "temperature schedule must be strictly decreasing".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Cumulative progress marker recorded after each transition step.
#[derive(Debug, Clone, Copy)]
pub struct StepMark {
    /// Distinct models scored so far.
    pub scored: usize,
    /// Seconds since the search started.
    pub elapsed: f64,
}

/// Append-only record of every model scored during one search run.
///
/// Entry insertion order is first-scored order, which makes the "models
/// scored before this one" statistic a plain index lookup.
#[derive(Debug, Clone, Default)]
pub struct Ledger {
    entries: IndexMap<Model, f64>,
    visit_order: Vec<(usize, Model)>,
    step_marks: Vec<StepMark>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score_of(&self, k: &Model) -> Option<f64> {
        self.entries.get(k).copied()
    }

    pub fn contains(&self, k: &Model) -> bool {
        self.entries.contains_key(k)
    }

    /// Entries in first-scored order.
    pub fn iter(&self) -> impl Iterator<Item = (&Model, f64)> {
        self.entries.iter().map(|(m, &s)| (m, s))
    }

    /// Number of distinct models scored strictly before `k` was first scored.
    pub fn first_hit_index(&self, k: &Model) -> Option<usize> {
        self.entries.get_index_of(k)
    }

    /// Elapsed seconds at the end of the step during which `k` was first
    /// scored.
    pub fn first_hit_elapsed(&self, k: &Model) -> Option<f64> {
        let idx = self.first_hit_index(k)?;
        self.step_marks
            .iter()
            .find(|mark| mark.scored > idx)
            .map(|mark| mark.elapsed)
            .or_else(|| self.step_marks.last().map(|mark| mark.elapsed))
    }

    /// The chain of visited models as `(iteration, model)`, starting with
    /// the initial model at iteration 0.
    pub fn visit_order(&self) -> &[(usize, Model)] {
        &self.visit_order
    }

    pub fn step_marks(&self) -> &[StepMark] {
        &self.step_marks
    }

    /// Models that scored `-inf` (degenerate or outside the prior support).
    pub fn failed_count(&self) -> usize {
        self.entries
            .values()
            .filter(|s| **s == f64::NEG_INFINITY)
            .count()
    }

    fn record(&mut self, k: Model, score: f64) {
        debug_assert!(!self.entries.contains_key(&k), "ledger entries never mutate");
        self.entries.insert(k, score);
    }

    fn push_visit(&mut self, iteration: usize, k: Model) {
        self.visit_order.push((iteration, k));
    }

    fn push_mark(&mut self, elapsed: f64) {
        self.step_marks.push(StepMark {
            scored: self.entries.len(),
            elapsed,
        });
    }
}

/// Threshold batch size above which candidate scoring fans out to the rayon
/// pool. Scoring is pure, so the thread count never changes the results.
const PARALLEL_BATCH: usize = 16;

/// Score every not-yet-cached candidate and record it, preserving candidate
/// order so the ledger's insertion order is thread-count independent.
fn ensure_scored<S: ModelScorer>(ledger: &mut Ledger, scorer: &S, candidates: &[Model]) {
    let missing: Vec<&Model> = candidates
        .iter()
        .filter(|m| !ledger.contains(m))
        .collect();
    if missing.is_empty() {
        return;
    }
    let scores: Vec<f64> = if missing.len() >= PARALLEL_BATCH {
        missing.par_iter().map(|m| scorer.score(m)).collect()
    } else {
        missing.iter().map(|m| scorer.score(m)).collect()
    };
    for (m, s) in missing.into_iter().zip(scores) {
        ledger.record(m.clone(), s);
    }
}

fn scores_for(ledger: &Ledger, set: &[Model]) -> Vec<f64> {
    set.iter()
        .map(|m| ledger.score_of(m).expect("candidate was just scored"))
        .collect()
}

/// Sample one finalist from a neighborhood component, or `None` when the
/// component is empty or entirely `-inf` (no probability mass). An empty or
/// massless component consumes no randomness.
fn pick_component<'a, R: rand::Rng>(
    ledger: &Ledger,
    set: &'a [Model],
    t: f64,
    rng: &mut R,
) -> Option<(&'a Model, f64)> {
    if set.is_empty() {
        return None;
    }
    let scores = scores_for(ledger, set);
    match sample::sample_tempered(&scores, t, rng) {
        Ok(i) => Some((&set[i], scores[i])),
        Err(_) => None,
    }
}

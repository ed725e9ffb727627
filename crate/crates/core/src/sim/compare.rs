//! Head-to-head cost comparison of S5 and SSS across problem sizes.

use crate::error::{Error, Result};
use crate::marginal::{log_posterior_score, ScorerConfig};
use crate::model::Model;
use crate::search::{posterior_summary, run_s5, run_sss, Algorithm, Ledger, SearchConfig};

use super::{gen_dataset, SimDesign};

/// Cost profile of a single run.
#[derive(Debug, Clone, Copy)]
pub struct SearchTimings {
    /// Whole-search wall time (scoring + search; data generation excluded).
    pub total_seconds: f64,
    /// Wall time until the run's eventual MAP model was first scored.
    pub first_hit_seconds: f64,
    /// Distinct models scored before the eventual MAP was first scored.
    pub first_hit_models: usize,
    /// Distinct models scored over the whole run.
    pub models_scored: usize,
}

/// Averages for one (p, algorithm) cell, plus per-dataset MAP agreement
/// between the two algorithms.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub p: usize,
    pub algo: &'static str,
    pub mean_total_seconds: f64,
    pub mean_first_hit_seconds: f64,
    pub mean_first_hit_models: f64,
    pub mean_models_scored: f64,
    /// Fraction of replicates (shared datasets) where this cell's MAP equals
    /// the other algorithm's MAP; identical for the two rows of a given `p`.
    pub map_agreement: f64,
}

fn timings(ledger: &Ledger, map: &Model) -> SearchTimings {
    let total_seconds = ledger
        .step_marks()
        .last()
        .map(|m| m.elapsed)
        .unwrap_or_default();
    SearchTimings {
        total_seconds,
        first_hit_seconds: ledger.first_hit_elapsed(map).unwrap_or(total_seconds),
        first_hit_models: ledger.first_hit_index(map).unwrap_or(0),
        models_scored: ledger.len(),
    }
}

/// For each `p` in the grid, run S5 and SSS on the same `replicates`
/// datasets and average their cost profiles. Replicates run sequentially so
/// the wall-clock numbers are not distorted by each other; candidate scoring
/// inside each search still uses the worker pool.
pub fn compare_search<F>(
    design_template: &SimDesign,
    p_grid: &[usize],
    make_scorer: F,
    s5_cfg: &SearchConfig,
    sss_cfg: &SearchConfig,
    replicates: usize,
    seed: u64,
) -> Result<Vec<CompareRow>>
where
    F: Fn(usize) -> ScorerConfig,
{
    if !matches!(s5_cfg.algorithm, Algorithm::S5 { .. })
        || !matches!(sss_cfg.algorithm, Algorithm::Sss { .. })
    {
        return Err(Error::InvalidConfig(
            "compare_search needs one S5 and one SSS configuration".into(),
        ));
    }
    let mut rows = Vec::with_capacity(2 * p_grid.len());
    for &p in p_grid {
        let mut design = design_template.clone();
        design.p = p;
        design.validate()?;
        let scorer_cfg = make_scorer(p);

        let mut s5_runs: Vec<SearchTimings> = Vec::with_capacity(replicates);
        let mut sss_runs: Vec<SearchTimings> = Vec::with_capacity(replicates);
        let mut agree = 0usize;
        for rep in 0..replicates as u64 {
            let (raw, _) = gen_dataset(&design, seed, rep)?;
            let data = raw.standardize()?;
            let scorer = |k: &Model| log_posterior_score(&data, k, &scorer_cfg);

            let mut cfg5 = s5_cfg.clone();
            cfg5.seed = super::prcurve::derive_seed(seed, rep, p);
            let ledger5 = run_s5(&data, &scorer, &cfg5, &Model::empty())?;
            let map5 = posterior_summary(&ledger5, 1e-3)?.map_model().clone();
            s5_runs.push(timings(&ledger5, &map5));
            drop(ledger5);

            let mut cfgs = sss_cfg.clone();
            cfgs.seed = super::prcurve::derive_seed(seed, rep, p + 1);
            let ledgers = run_sss(&data, &scorer, &cfgs, &Model::empty())?;
            let maps = posterior_summary(&ledgers, 1e-3)?.map_model().clone();
            sss_runs.push(timings(&ledgers, &maps));

            if map5 == maps {
                agree += 1;
            }
        }

        let agreement = agree as f64 / replicates as f64;
        for (algo, runs) in [("s5", &s5_runs), ("sss", &sss_runs)] {
            let nf = runs.len() as f64;
            rows.push(CompareRow {
                p,
                algo,
                mean_total_seconds: runs.iter().map(|t| t.total_seconds).sum::<f64>() / nf,
                mean_first_hit_seconds: runs.iter().map(|t| t.first_hit_seconds).sum::<f64>()
                    / nf,
                mean_first_hit_models: runs.iter().map(|t| t.first_hit_models as f64).sum::<f64>()
                    / nf,
                mean_models_scored: runs.iter().map(|t| t.models_scored as f64).sum::<f64>() / nf,
                map_agreement: agreement,
            });
        }
    }
    Ok(rows)
}

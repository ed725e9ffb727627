//! Precision-recall sweeps over a hyperparameter grid.

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::Result;
use crate::marginal::{log_posterior_score, ScorerConfig};
use crate::model::Model;
use crate::search::{posterior_summary, run_s5, run_sss, Algorithm, SearchConfig};

use super::{gen_dataset, selection_metrics, SimDesign};

/// One point of an averaged precision-recall curve.
#[derive(Debug, Clone, Copy)]
pub struct PrPoint {
    pub hyper: f64,
    pub precision: f64,
    pub recall: f64,
    /// Replicates that contributed to this point.
    pub replicates: usize,
}

#[derive(Debug, Clone)]
pub struct PrCurve {
    /// One averaged point per grid value, in grid order.
    pub points: Vec<PrPoint>,
    /// Trapezoid area over recall-sorted points, anchored at recall 0 with
    /// the lowest-recall precision. `None` (degenerate) for single-point
    /// grids.
    pub area: Option<f64>,
    /// Replicate × grid evaluations that failed and were excluded.
    pub failed: usize,
}

/// Run the search once per (replicate, grid value) pair, summarize each run
/// by its MAP model, and vertically average precision and recall per grid
/// value across replicates. Each replicate reuses one dataset across the
/// whole grid so the sweep isolates the hyperparameter.
pub fn pr_curve<F>(
    design: &SimDesign,
    make_scorer: F,
    grid: &[f64],
    replicates: usize,
    search: &SearchConfig,
    seed: u64,
) -> Result<PrCurve>
where
    F: Fn(f64) -> ScorerConfig + Sync,
{
    assert!(!grid.is_empty(), "hyperparameter grid must be nonempty");
    design.validate()?;
    search.validate()?;

    // per (replicate, grid): Some((precision, recall)) or None on failure
    let per_rep: Vec<Vec<Option<(f64, f64)>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| -> Vec<Option<(f64, f64)>> {
            let generated = gen_dataset(design, seed, rep)
                .and_then(|(raw, _)| raw.standardize());
            let data = match generated {
                Ok(d) => d,
                Err(err) => {
                    log::warn!("replicate {rep} failed to generate: {err}");
                    return vec![None; grid.len()];
                }
            };
            grid.iter()
                .enumerate()
                .map(|(gi, &hyper)| {
                    let cfg = make_scorer(hyper);
                    let map = search_map(&data, &cfg, search, derive_seed(seed, rep, gi))?;
                    let m = selection_metrics(&map, &design.true_model);
                    Some((m.precision, m.recall))
                })
                .collect()
        })
        .collect();

    let mut failed = 0usize;
    let mut points = Vec::with_capacity(grid.len());
    for (gi, &hyper) in grid.iter().enumerate() {
        let mut psum = 0.0;
        let mut rsum = 0.0;
        let mut count = 0usize;
        for rep in &per_rep {
            match rep[gi] {
                Some((p, r)) => {
                    psum += p;
                    rsum += r;
                    count += 1;
                }
                None => failed += 1,
            }
        }
        let (precision, recall) = if count > 0 {
            (psum / count as f64, rsum / count as f64)
        } else {
            (f64::NAN, f64::NAN)
        };
        points.push(PrPoint {
            hyper,
            precision,
            recall,
            replicates: count,
        });
    }

    let area = pr_area(&points);
    Ok(PrCurve {
        points,
        area,
        failed,
    })
}

/// Trapezoid area under recall-sorted points, anchored at recall 0 with the
/// precision of the lowest-recall point. An all-ideal curve (every point at
/// precision = recall = 1) therefore integrates to exactly 1.
pub fn pr_area(points: &[PrPoint]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.precision.is_finite() && p.recall.is_finite())
        .map(|p| (p.recall, p.precision))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut area = pts[0].0 * pts[0].1; // anchor (0, p_first) .. (r_first, p_first)
    for w in pts.windows(2) {
        area += (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1);
    }
    Some(area)
}

/// Run the configured search and return the ledger MAP.
pub(crate) fn search_map(
    data: &Dataset,
    scorer_cfg: &ScorerConfig,
    search: &SearchConfig,
    seed: u64,
) -> Option<Model> {
    let scorer = |k: &Model| log_posterior_score(data, k, scorer_cfg);
    let mut cfg = search.clone();
    cfg.seed = seed;
    let ledger = match cfg.algorithm {
        Algorithm::Sss { .. } => run_sss(data, &scorer, &cfg, &Model::empty()),
        Algorithm::S5 { .. } => run_s5(data, &scorer, &cfg, &Model::empty()),
    };
    match ledger.and_then(|l| posterior_summary(&l, 1e-3).map(|s| s.map_model().clone())) {
        Ok(map) => Some(map),
        Err(err) => {
            log::warn!("search failed: {err}");
            None
        }
    }
}

pub(crate) fn derive_seed(master: u64, replicate: u64, grid_index: usize) -> u64 {
    // splitmix-style mix; decorrelates (replicate, grid) streams
    let mut z = master
        .wrapping_add(replicate.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add((grid_index as u64).wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

//! Out-of-sample prediction error under repeated train/test splits.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::marginal::ScorerConfig;
use crate::model::Model;
use crate::search::SearchConfig;

use super::prcurve::{derive_seed, search_map};
use super::replicate_rng;

/// Aggregates over repeated random splits, mirroring the usual
/// MSPE / model-size / stability reporting.
#[derive(Debug, Clone)]
pub struct MspeReport {
    pub mean_mspe: f64,
    pub sd_mspe: f64,
    pub avg_model_size: f64,
    /// Columns selected in at least 95% of replicates.
    pub frequently_selected: Vec<u32>,
    /// Columns selected at least once.
    pub ever_selected: Vec<u32>,
    pub replicates: usize,
    /// Set when a standard deviation could not be estimated
    /// (single replicate).
    pub degenerate: bool,
    pub failed: usize,
}

/// Split → search on the standardized training block → least-squares refit
/// of the MAP model (with intercept, on the raw scale) → predict the held
/// out rows.
pub fn mspe_evaluate(
    raw: &Dataset,
    scorer_cfg: &ScorerConfig,
    search: &SearchConfig,
    test_fraction: f64,
    replicates: usize,
    seed: u64,
) -> Result<MspeReport> {
    if !(test_fraction > 0.0 && test_fraction <= 0.5) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must be in (0, 0.5], got {test_fraction}"
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidConfig("need at least one replicate".into()));
    }
    let n = raw.n();
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 2);

    let outcomes: Vec<Option<(f64, Model)>> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let (test_idx, train_idx) = order.split_at(n_test);
            replicate_mspe(raw, scorer_cfg, search, derive_seed(seed, rep, 0), train_idx, test_idx)
                .map_err(|err| log::warn!("mspe replicate {rep} failed: {err}"))
                .ok()
        })
        .collect();

    let ok: Vec<&(f64, Model)> = outcomes.iter().flatten().collect();
    let failed = replicates - ok.len();
    if ok.is_empty() {
        return Err(Error::EmptyLedger);
    }

    let mean_mspe = ok.iter().map(|(m, _)| m).sum::<f64>() / ok.len() as f64;
    let sd_mspe = if ok.len() > 1 {
        (ok.iter().map(|(m, _)| (m - mean_mspe).powi(2)).sum::<f64>() / (ok.len() - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let avg_model_size =
        ok.iter().map(|(_, k)| k.size() as f64).sum::<f64>() / ok.len() as f64;

    let mut counts = vec![0usize; raw.p()];
    for (_, k) in &ok {
        for j in k.iter() {
            counts[j] += 1;
        }
    }
    let freq_threshold = ((0.95 * ok.len() as f64).ceil() as usize).max(1);
    let frequently_selected: Vec<u32> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= freq_threshold)
        .map(|(j, _)| j as u32)
        .collect();
    let ever_selected: Vec<u32> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(j, _)| j as u32)
        .collect();

    Ok(MspeReport {
        mean_mspe,
        sd_mspe,
        avg_model_size,
        frequently_selected,
        ever_selected,
        replicates: ok.len(),
        degenerate: ok.len() < 2,
        failed,
    })
}

fn replicate_mspe(
    raw: &Dataset,
    scorer_cfg: &ScorerConfig,
    search: &SearchConfig,
    search_seed: u64,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<(f64, Model)> {
    let train = subset(raw, train_idx)?;
    let train_std = train.standardize()?;
    let map = search_map(&train_std, scorer_cfg, search, search_seed)
        .ok_or(Error::EmptyLedger)?;

    // Least-squares refit with intercept on the raw training scale.
    let m = map.size();
    let rows = train_idx.len();
    let mut x = DMatrix::zeros(rows, m + 1);
    for (ri, &i) in train_idx.iter().enumerate() {
        x[(ri, 0)] = 1.0;
        for (ci, j) in map.iter().enumerate() {
            x[(ri, ci + 1)] = raw.col(j)[i];
        }
    }
    let yv = DVector::from_iterator(rows, train_idx.iter().map(|&i| raw.y()[i]));
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &yv;
    let beta = nalgebra::Cholesky::new(xtx)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?
        .solve(&xty);

    let mut sse = 0.0;
    for &i in test_idx {
        let mut pred = beta[0];
        for (ci, j) in map.iter().enumerate() {
            pred += beta[ci + 1] * raw.col(j)[i];
        }
        let e = raw.y()[i] - pred;
        sse += e * e;
    }
    Ok((sse / test_idx.len() as f64, map))
}

fn subset(raw: &Dataset, rows: &[usize]) -> Result<Dataset> {
    let y: Vec<f64> = rows.iter().map(|&i| raw.y()[i]).collect();
    let mut x = Vec::with_capacity(rows.len() * raw.p());
    for j in 0..raw.p() {
        let col = raw.col(j);
        x.extend(rows.iter().map(|&i| col[i]));
    }
    Dataset::from_parts(y, x, rows.len(), raw.p())
}

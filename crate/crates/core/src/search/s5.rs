//! Simplified shotgun stochastic search with screening.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{ols_fit, ridge_fit};
use crate::model::Model;

use super::{
    ensure_scored, pick_component, screen::screen, Algorithm, Ledger, ModelScorer, ScreenResidual,
    SearchConfig,
};

/// Run S5: for each temperature `t` in the schedule, take `J - 1` tempered
/// steps over the screened neighborhood `{Γ⁺_scr, Γ⁻}` of the current model,
/// where `Γ⁺_scr` restricts additions to the top-`Mn` columns by residual
/// correlation. Swaps are never constructed. The screened column set is
/// refreshed from the new model's residual after every transition.
pub fn run_s5<S: ModelScorer>(
    data: &Dataset,
    scorer: &S,
    cfg: &SearchConfig,
    init: &Model,
) -> Result<Ledger> {
    cfg.validate()?;
    let (iters, mn, schedule) = match &cfg.algorithm {
        Algorithm::S5 {
            iterations_per_level,
            screen_size,
            schedule,
        } => (*iterations_per_level, *screen_size, schedule.clone()),
        _ => return Err(Error::InvalidConfig("run_s5 needs an S5 config".into())),
    };
    if init.size() > cfg.qn {
        return Err(Error::InvalidConfig(format!(
            "initial model size {} exceeds qn = {}",
            init.size(),
            cfg.qn
        )));
    }
    if cfg.qn >= data.n() {
        return Err(Error::InvalidConfig(format!(
            "qn = {} must be below n = {}",
            cfg.qn,
            data.n()
        )));
    }

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ledger = Ledger::new();
    let mut current = init.clone();

    ensure_scored(&mut ledger, scorer, std::slice::from_ref(&current));
    ledger.push_visit(0, current.clone());
    let mut screened = screen(data, &residual_of(data, &current, cfg.screen_residual), &current, mn);

    let mut iteration = 0usize;
    for &t in &schedule {
        for _ in 1..iters {
            let (additions, deletions) = screened_neighborhood(&current, &screened, cfg.qn);
            ensure_scored(&mut ledger, scorer, &additions);
            ensure_scored(&mut ledger, scorer, &deletions);

            let mut finalists: Vec<(Model, f64)> = Vec::with_capacity(2);
            for set in [&additions, &deletions] {
                if let Some((m, s)) = pick_component(&ledger, set, t, &mut rng) {
                    finalists.push((m.clone(), s));
                }
            }

            if finalists.is_empty() {
                log::warn!("S5 dead end at {current}: every neighbor scored -inf; staying put");
            } else {
                let scores: Vec<f64> = finalists.iter().map(|(_, s)| *s).collect();
                let pick = super::sample::sample_tempered(&scores, t, &mut rng)
                    .expect("finalists have positive mass");
                current = finalists.swap_remove(pick).0;
            }

            iteration += 1;
            ledger.push_visit(iteration, current.clone());
            screened = screen(
                data,
                &residual_of(data, &current, cfg.screen_residual),
                &current,
                mn,
            );
            ledger.push_mark(start.elapsed().as_secs_f64());
        }
    }

    // Score the final model's screened neighborhood so a run with a single
    // level and unit temperature produces the same ledger as swap-free SSS.
    let (additions, deletions) = screened_neighborhood(&current, &screened, cfg.qn);
    ensure_scored(&mut ledger, scorer, &additions);
    ensure_scored(&mut ledger, scorer, &deletions);
    ledger.push_mark(start.elapsed().as_secs_f64());

    Ok(ledger)
}

/// `Γ⁺_scr` (additions restricted to the screened set, suppressed at the
/// size cap) and `Γ⁻` (all single deletions).
fn screened_neighborhood(
    current: &Model,
    screened: &super::ScreenSet,
    qn: usize,
) -> (Vec<Model>, Vec<Model>) {
    let additions = if current.size() + 1 <= qn {
        screened
            .indices()
            .iter()
            .filter(|&&j| !current.contains(j))
            .map(|&j| current.with_added(j))
            .collect()
    } else {
        Vec::new()
    };
    let deletions = current
        .indices()
        .iter()
        .map(|&j| current.with_removed(j))
        .collect();
    (additions, deletions)
}

fn residual_of(data: &Dataset, k: &Model, kind: ScreenResidual) -> Vec<f64> {
    match kind {
        ScreenResidual::Ols => match ols_fit(data, k) {
            Ok(fit) => fit.residual,
            Err(err) => {
                log::warn!("screening residual fell back to ridge: {err}");
                ridge_fit(data, k, 1.0).map(|f| f.residual).unwrap_or_else(|_| data.y().to_vec())
            }
        },
        ScreenResidual::Ridge(tau) => ridge_fit(data, k, tau)
            .map(|f| f.residual)
            .unwrap_or_else(|_| data.y().to_vec()),
    }
}

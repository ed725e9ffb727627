//! Shotgun stochastic search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{neighborhood, Model};

use super::{ensure_scored, pick_component, Algorithm, Ledger, ModelScorer, SearchConfig};

/// Run SSS: at each step score the full one-change neighborhood
/// `{Γ⁺, Γ⁻, Γ⁰}` of the current model, sample one finalist per component
/// with probability proportional to `π(k|y)`, then move to one of the
/// finalists, again proportionally to `π(·|y)`.
///
/// Visits exactly `steps` models (`steps - 1` transitions); the final
/// model's neighborhood is scored as well. Every scored model lands in the
/// returned [`Ledger`].
pub fn run_sss<S: ModelScorer>(
    data: &Dataset,
    scorer: &S,
    cfg: &SearchConfig,
    init: &Model,
) -> Result<Ledger> {
    run_sss_with_swaps(data, scorer, cfg, init, true)
}

/// SSS with the swap component optionally disabled. With swaps off the
/// per-step candidate set matches a single-temperature, unscreened S5 step,
/// which is how the two searches are cross-checked against each other.
#[doc(hidden)]
pub fn run_sss_with_swaps<S: ModelScorer>(
    data: &Dataset,
    scorer: &S,
    cfg: &SearchConfig,
    init: &Model,
    swaps: bool,
) -> Result<Ledger> {
    cfg.validate()?;
    let steps = match cfg.algorithm {
        Algorithm::Sss { steps } => steps,
        _ => return Err(Error::InvalidConfig("run_sss needs an SSS config".into())),
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

    for step in 1..=steps {
        let mut nbd = neighborhood(&current, data.p(), cfg.qn);
        if !swaps {
            nbd.swaps.clear();
        }
        ensure_scored(&mut ledger, scorer, &nbd.additions);
        ensure_scored(&mut ledger, scorer, &nbd.deletions);
        ensure_scored(&mut ledger, scorer, &nbd.swaps);

        if step == steps {
            ledger.push_mark(start.elapsed().as_secs_f64());
            break;
        }

        let mut finalists: Vec<(Model, f64)> = Vec::with_capacity(3);
        for set in [&nbd.additions, &nbd.deletions, &nbd.swaps] {
            if let Some((m, s)) = pick_component(&ledger, set, 1.0, &mut rng) {
                finalists.push((m.clone(), s));
            }
        }

        if finalists.is_empty() {
            log::warn!("SSS dead end at {current}: every neighbor scored -inf; staying put");
        } else {
            let scores: Vec<f64> = finalists.iter().map(|(_, s)| *s).collect();
            let pick = super::sample::sample_tempered(&scores, 1.0, &mut rng)
                .expect("finalists have positive mass");
            current = finalists.swap_remove(pick).0;
        }
        ledger.push_visit(step, current.clone());
        ledger.push_mark(start.elapsed().as_secs_f64());
    }

    Ok(ledger)
}

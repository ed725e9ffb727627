mod args;
mod csvio;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use sha2::{Digest, Sha256};

use s5_core::marginal::{log_posterior_score, ScorerConfig, SigmaMode};
use s5_core::search::{posterior_summary, run_s5, run_sss, Algorithm, Ledger, SearchConfig};
use s5_core::sim::{compare_search, gen_dataset, pr_curve, selection_metrics, SimDesign};
use s5_core::{Dataset, Model, ModelPrior, PriorFamily};

use args::{cov_case, Cli, Command};
use report::Report;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse(); // clap exits 2 on usage errors

    let (command, output) = match &cli.command {
        Command::Select(a) => ("select", a.common.output.clone()),
        Command::Simulate(a) => ("simulate", a.common.output.clone()),
        Command::Prc(a) => ("prc", a.bench.common.output.clone()),
        Command::CompareSearch(a) => ("compare-search", a.common.output.clone()),
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report::emit_error(command, &err, output.as_deref());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Prc(a) => cmd_prc(a),
        Command::CompareSearch(a) => cmd_compare(a),
    }
}

fn init_threads(threads: Option<usize>) -> anyhow::Result<usize> {
    let t = threads.unwrap_or_else(num_cpus);
    rayon::ThreadPoolBuilder::new()
        .num_threads(t)
        .build_global()
        .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    Ok(t)
}

fn num_cpus() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn scorer_json(cfg: &ScorerConfig, threads: usize) -> serde_json::Value {
    let prior = match cfg.prior {
        PriorFamily::Pemom { tau } => serde_json::json!({"family": "pemom", "tau": tau}),
        PriorFamily::Pimom { tau, r } => serde_json::json!({"family": "pimom", "tau": tau, "r": r}),
        PriorFamily::GPrior { g } => serde_json::json!({"family": "gprior", "g": g}),
        PriorFamily::ReducedRlasso { tau } => {
            serde_json::json!({"family": "rlasso", "tau": tau})
        }
    };
    let model_prior = match cfg.model_prior {
        ModelPrior::UniformRestricted { qn } => {
            serde_json::json!({"kind": "uniform", "qn": qn})
        }
        ModelPrior::BetaBinomial { qn, p } => {
            serde_json::json!({"kind": "betabinomial", "qn": qn, "p": p})
        }
    };
    let sigma = match cfg.sigma_mode {
        SigmaMode::Known(s) => serde_json::json!({"mode": "known", "sigma2": s}),
        SigmaMode::InverseGamma { a0, b0 } => {
            serde_json::json!({"mode": "inverse_gamma", "a0": a0, "b0": b0})
        }
    };
    serde_json::json!({
        "prior": prior,
        "model_prior": model_prior,
        "sigma": sigma,
        "threads": threads,
    })
}

fn search_json(cfg: &SearchConfig) -> serde_json::Value {
    match &cfg.algorithm {
        Algorithm::Sss { steps } => serde_json::json!({"algo": "sss", "N": steps, "qn": cfg.qn}),
        Algorithm::S5 {
            iterations_per_level,
            screen_size,
            schedule,
        } => serde_json::json!({
            "algo": "s5",
            "J": iterations_per_level,
            "L": schedule.len(),
            "Mn": screen_size,
            "schedule": schedule,
            "qn": cfg.qn,
        }),
    }
}

fn run_search(
    data: &Dataset,
    scorer_cfg: &ScorerConfig,
    search_cfg: &SearchConfig,
) -> anyhow::Result<Ledger> {
    let scorer = |k: &Model| log_posterior_score(data, k, scorer_cfg);
    let ledger = match search_cfg.algorithm {
        Algorithm::Sss { .. } => run_sss(data, &scorer, search_cfg, &Model::empty())?,
        Algorithm::S5 { .. } => run_s5(data, &scorer, search_cfg, &Model::empty())?,
    };
    Ok(ledger)
}

fn cmd_select(a: args::SelectArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let threads = init_threads(a.common.threads)?;
    let loaded = csvio::load_csv(&a.input, &a.response)?;
    let data = loaded.data.standardize()?;

    let resolved = a.scorer.resolve(data.n(), data.p())?;
    let search_cfg = a.search.resolve(resolved.config.qn(), a.common.seed)?;

    let ledger = run_search(&data, &resolved.config, &search_cfg)?;
    let summary = posterior_summary(&ledger, 1e-3)?;

    let mut rep = Report::new(
        "select",
        serde_json::json!({
            "input": a.input,
            "response": a.response,
            "scorer": scorer_json(&resolved.config, threads),
            "search": search_json(&search_cfg),
            "tau_defaulted": resolved.tau_was_defaulted,
        }),
        a.common.seed,
    );
    rep.warnings = resolved.warnings;
    for name in &loaded.dropped {
        rep.warnings
            .push(format!("dropped constant column {name:?}"));
    }
    rep.attach_posterior(&ledger, &summary);
    rep.metrics = serde_json::json!({
        "n": data.n(),
        "p": data.p(),
        "columns": loaded.names,
        "dropped_columns": loaded.dropped,
        "models_scored": ledger.len(),
        "failed_scores": ledger.failed_count(),
        "map_columns": summary.map_model().iter()
            .map(|j| loaded.names[j].clone()).collect::<Vec<_>>(),
    });
    rep.timing.wall_seconds = started.elapsed().as_secs_f64();
    rep.emit(a.common.output.as_deref())
}

fn data_checksum(data: &Dataset) -> String {
    let mut hasher = Sha256::new();
    for v in data.y() {
        hasher.update(v.to_le_bytes());
    }
    for j in 0..data.p() {
        for v in data.col(j) {
            hasher.update(v.to_le_bytes());
        }
    }
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn cmd_simulate(a: args::BenchArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let threads = init_threads(a.common.threads)?;
    let design = SimDesign::new(cov_case(a.case)?, a.n, a.p);
    let (raw, signed_beta) = gen_dataset(&design, a.common.seed, 0)?;
    let checksum = data_checksum(&raw);
    let data = raw.standardize()?;

    let resolved = a.scorer.resolve(data.n(), data.p())?;
    let search_cfg = a.search.resolve(resolved.config.qn(), a.common.seed)?;
    let ledger = run_search(&data, &resolved.config, &search_cfg)?;
    let summary = posterior_summary(&ledger, 1e-3)?;
    let metrics = selection_metrics(summary.map_model(), &design.true_model);

    let mut rep = Report::new(
        "simulate",
        serde_json::json!({
            "case": a.case,
            "n": a.n,
            "p": a.p,
            "scorer": scorer_json(&resolved.config, threads),
            "search": search_json(&search_cfg),
        }),
        a.common.seed,
    );
    rep.warnings = resolved.warnings;
    rep.attach_posterior(&ledger, &summary);
    rep.metrics = serde_json::json!({
        "truth": design.true_model.indices(),
        "signed_beta": signed_beta,
        "selection": {
            "tp": metrics.tp, "fp": metrics.fp, "fn": metrics.fn_,
            "precision": metrics.precision, "recall": metrics.recall,
        },
        "true_model_prob": summary.prob_of(&ledger, &design.true_model),
        "models_scored": ledger.len(),
        "failed_scores": ledger.failed_count(),
        "data_checksum": checksum,
    });
    rep.timing.wall_seconds = started.elapsed().as_secs_f64();
    rep.emit(a.common.output.as_deref())
}

fn cmd_prc(a: args::PrcArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let threads = init_threads(a.bench.common.threads)?;
    let design = SimDesign::new(cov_case(a.bench.case)?, a.bench.n, a.bench.p);

    let resolved = a.bench.scorer.resolve(a.bench.n, a.bench.p)?;
    let search_cfg = a
        .bench
        .search
        .resolve(resolved.config.qn(), a.bench.common.seed)?;

    let family = a.bench.scorer.prior.clone();
    let grid: Vec<f64> = match family.as_str() {
        "gprior" => a
            .g_grid
            .clone()
            .unwrap_or_else(|| vec![1e3, 1e6, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13]),
        _ => a
            .tau_grid
            .clone()
            .unwrap_or_else(|| vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0, 8.0, 12.0]),
    };
    if grid.is_empty() {
        anyhow::bail!("hyperparameter grid is empty");
    }

    let base = resolved.config.clone();
    let make_scorer = |hyper: f64| -> ScorerConfig {
        let mut cfg = base.clone();
        cfg.prior = match cfg.prior {
            PriorFamily::Pemom { .. } => PriorFamily::Pemom { tau: hyper },
            PriorFamily::Pimom { r, .. } => PriorFamily::Pimom { tau: hyper, r },
            PriorFamily::GPrior { .. } => PriorFamily::GPrior { g: hyper },
            PriorFamily::ReducedRlasso { .. } => PriorFamily::ReducedRlasso { tau: hyper },
        };
        cfg
    };

    let curve = pr_curve(
        &design,
        make_scorer,
        &grid,
        a.replicates,
        &search_cfg,
        a.bench.common.seed,
    )?;

    if let Some(path) = &a.curve_csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["hyper", "precision", "recall"])?;
        for pt in &curve.points {
            w.write_record(&[
                pt.hyper.to_string(),
                pt.precision.to_string(),
                pt.recall.to_string(),
            ])?;
        }
        w.flush()?;
    }

    let mut rep = Report::new(
        "prc",
        serde_json::json!({
            "case": a.bench.case,
            "n": a.bench.n,
            "p": a.bench.p,
            "replicates": a.replicates,
            "grid": grid,
            "grid_note": "default grids bracket the oracle hyperparameter ranges",
            "scorer": scorer_json(&resolved.config, threads),
            "search": search_json(&search_cfg),
        }),
        a.bench.common.seed,
    );
    rep.warnings = resolved.warnings;
    rep.metrics = serde_json::json!({
        "points": curve.points.iter().map(|pt| serde_json::json!({
            "hyper": pt.hyper,
            "precision": pt.precision,
            "recall": pt.recall,
            "replicates": pt.replicates,
        })).collect::<Vec<_>>(),
        "area": curve.area,
        "degenerate": curve.area.is_none(),
        "failed": curve.failed,
    });
    rep.timing.wall_seconds = started.elapsed().as_secs_f64();
    rep.emit(a.bench.common.output.as_deref())
}

fn cmd_compare(a: args::CompareArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let threads = init_threads(a.common.threads)?;
    let first_p = *a.p.first().ok_or_else(|| anyhow::anyhow!("empty p grid"))?;
    let max_p = a.p.iter().copied().max().unwrap_or(first_p);
    let design = SimDesign::new(cov_case(a.case)?, a.n, max_p);

    let resolved = a.scorer.resolve(a.n, first_p)?;
    let n = a.n;
    let scorer_args = &a.scorer;
    let make_scorer = |p: usize| -> ScorerConfig {
        scorer_args
            .resolve(n, p)
            .expect("scorer arguments already validated")
            .config
    };

    let s5_cfg = args::SearchArgs {
        algo: "s5".into(),
        ..clone_search(&a.search)
    }
    .resolve(resolved.config.qn(), a.common.seed)?;
    let sss_cfg = args::SearchArgs {
        algo: "sss".into(),
        ..clone_search(&a.search)
    }
    .resolve(resolved.config.qn(), a.common.seed)?;

    let rows = compare_search(
        &design,
        &a.p,
        make_scorer,
        &s5_cfg,
        &sss_cfg,
        a.replicates,
        a.common.seed,
    )?;

    let mut rep = Report::new(
        "compare-search",
        serde_json::json!({
            "case": a.case,
            "n": a.n,
            "p_grid": a.p,
            "replicates": a.replicates,
            "scorer": scorer_json(&resolved.config, threads),
            "s5": search_json(&s5_cfg),
            "sss": search_json(&sss_cfg),
        }),
        a.common.seed,
    );
    rep.warnings = resolved.warnings;
    rep.metrics = serde_json::json!({
        "rows": rows.iter().map(|r| serde_json::json!({
            "p": r.p,
            "algo": r.algo,
            "mean_total_seconds": r.mean_total_seconds,
            "mean_first_hit_seconds": r.mean_first_hit_seconds,
            "mean_first_hit_models": r.mean_first_hit_models,
            "mean_models_scored": r.mean_models_scored,
            "map_agreement": r.map_agreement,
        })).collect::<Vec<_>>(),
    });
    rep.timing.wall_seconds = started.elapsed().as_secs_f64();
    rep.emit(a.common.output.as_deref())
}

fn clone_search(s: &args::SearchArgs) -> args::SearchArgs {
    args::SearchArgs {
        algo: s.algo.clone(),
        mn: s.mn,
        j: s.j,
        l: s.l,
        n_iter: s.n_iter,
        schedule: s.schedule.clone(),
    }
}

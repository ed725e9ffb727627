//! Command-line interface definition and validation into core configs.

use clap::{Args, Parser, Subcommand};

use s5_core::marginal::{OptimizerConfig, ScorerConfig, SigmaMode};
use s5_core::search::{geometric_schedule, Algorithm, SearchConfig};
use s5_core::sim::CovCase;
use s5_core::{ModelPrior, PriorFamily};

#[derive(Parser, Debug)]
#[command(
    name = "s5",
    about = "Bayesian variable selection with nonlocal priors and the S5/SSS searches",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Select variables on a CSV dataset.
    Select(SelectArgs),
    /// Generate one synthetic dataset, run selection, and score it against
    /// the known truth.
    Simulate(BenchArgs),
    /// Precision-recall sweep over a hyperparameter grid.
    Prc(PrcArgs),
    /// Compare S5 and SSS cost profiles across problem sizes.
    CompareSearch(CompareArgs),
}

#[derive(Args, Debug)]
pub struct ScorerArgs {
    /// Coefficient prior / score family.
    #[arg(long, value_parser = ["pemom", "pimom", "gprior", "rlasso"], default_value = "pemom")]
    pub prior: String,

    /// Nonlocal scale; defaults to log(n)·log(p) resolved after data load.
    #[arg(long)]
    pub tau: Option<f64>,

    /// g-prior scale; defaults to p².
    #[arg(long)]
    pub g: Option<f64>,

    /// piMoM order.
    #[arg(long, default_value_t = 1)]
    pub r: u32,

    /// Model-space prior.
    #[arg(long = "model-prior", value_parser = ["uniform", "betabinomial"], default_value = "uniform")]
    pub model_prior: String,

    /// Maximum model size; defaults to min(n-2, 40).
    #[arg(long)]
    pub qn: Option<usize>,

    /// Treat sigma^2 as known at this value instead of integrating it.
    #[arg(long)]
    pub sigma2: Option<f64>,

    /// Inverse-gamma shape for sigma^2.
    #[arg(long, default_value_t = 0.1)]
    pub a0: f64,

    /// Inverse-gamma rate for sigma^2.
    #[arg(long, default_value_t = 0.1)]
    pub b0: f64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Search algorithm.
    #[arg(long, value_parser = ["s5", "sss"], default_value = "s5")]
    pub algo: String,

    /// S5 screening size.
    #[arg(long = "Mn", default_value_t = 20)]
    pub mn: usize,

    /// S5 iterations per temperature level.
    #[arg(long = "J", default_value_t = 20)]
    pub j: usize,

    /// S5 temperature levels (ignored when --schedule is given).
    #[arg(long = "L", default_value_t = 20)]
    pub l: usize,

    /// SSS iteration count.
    #[arg(long = "N", default_value_t = 400)]
    pub n_iter: usize,

    /// Explicit decreasing temperature schedule, e.g. 3,2,1.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for candidate scoring (default: available cores).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output path for the JSON report (default: stdout).
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    /// Input CSV with a header row.
    #[arg(long, required = true)]
    pub input: std::path::PathBuf,

    /// Name of the response column.
    #[arg(long, required = true)]
    pub response: String,

    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Covariance design: 1 compound symmetry, 2 AR(1), 3 isotropic.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), default_value_t = 3)]
    pub case: u8,

    #[arg(long, default_value_t = 100)]
    pub n: usize,

    #[arg(long, default_value_t = 50)]
    pub p: usize,

    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct PrcArgs {
    #[command(flatten)]
    pub bench: BenchArgs,

    #[arg(long, default_value_t = 20)]
    pub replicates: usize,

    /// τ grid for pemom/pimom/rlasso sweeps.
    #[arg(long = "tau-grid", value_delimiter = ',')]
    pub tau_grid: Option<Vec<f64>>,

    /// g grid for gprior sweeps.
    #[arg(long = "g-grid", value_delimiter = ',')]
    pub g_grid: Option<Vec<f64>>,

    /// Optional CSV dump of (hyper, precision, recall) points.
    #[arg(long = "curve-csv")]
    pub curve_csv: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Covariance design: 1 compound symmetry, 2 AR(1), 3 isotropic.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), default_value_t = 1)]
    pub case: u8,

    #[arg(long, default_value_t = 200)]
    pub n: usize,

    /// Comma-separated grid of p values, e.g. 400,1600.
    #[arg(long, value_delimiter = ',', default_value = "400,1600")]
    pub p: Vec<usize>,

    #[arg(long, default_value_t = 20)]
    pub replicates: usize,

    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// The scorer arguments resolved against a concrete (n, p).
pub struct ResolvedScorer {
    pub config: ScorerConfig,
    pub warnings: Vec<String>,
    pub tau_was_defaulted: bool,
}

impl ScorerArgs {
    /// Apply the data-dependent defaults and build the core config.
    pub fn resolve(&self, n: usize, p: usize) -> anyhow::Result<ResolvedScorer> {
        let mut warnings = Vec::new();
        let tau_default = s5_core::default_tau(n, p);
        let tau = self.tau.unwrap_or(tau_default);
        let tau_was_defaulted = self.tau.is_none();

        let prior = match self.prior.as_str() {
            "pemom" => PriorFamily::Pemom { tau },
            "pimom" => PriorFamily::Pimom { tau, r: self.r },
            "gprior" => PriorFamily::GPrior {
                g: self.g.unwrap_or((p as f64) * (p as f64)),
            },
            "rlasso" => PriorFamily::ReducedRlasso { tau },
            other => anyhow::bail!("unknown prior {other}"),
        };

        // Consistency of the nonlocal scale with the regime the asymptotic
        // theory needs: log p ≺ τ ≺ n.
        if matches!(
            prior,
            PriorFamily::Pemom { .. } | PriorFamily::Pimom { .. } | PriorFamily::ReducedRlasso { .. }
        ) && tau <= (p as f64).ln()
        {
            warnings.push(format!(
                "tau = {tau:.4} is at or below log p = {:.4}; the selection-consistency growth condition (log p < tau < n) is violated",
                (p as f64).ln()
            ));
        }

        let qn = self.qn.unwrap_or_else(|| n.saturating_sub(2).min(40).max(1));
        if qn >= n {
            anyhow::bail!("qn = {qn} must be below n = {n}");
        }
        let model_prior = match self.model_prior.as_str() {
            "uniform" => ModelPrior::UniformRestricted { qn },
            "betabinomial" => ModelPrior::BetaBinomial { qn, p },
            other => anyhow::bail!("unknown model prior {other}"),
        };

        let sigma_mode = match self.sigma2 {
            Some(s) => SigmaMode::Known(s),
            None => SigmaMode::InverseGamma {
                a0: self.a0,
                b0: self.b0,
            },
        };

        let config = ScorerConfig {
            prior,
            model_prior,
            sigma_mode,
            optimizer: OptimizerConfig::default(),
        };
        config.validate()?;
        Ok(ResolvedScorer {
            config,
            warnings,
            tau_was_defaulted,
        })
    }
}

impl SearchArgs {
    pub fn resolve(&self, qn: usize, seed: u64) -> anyhow::Result<SearchConfig> {
        let algorithm = match self.algo.as_str() {
            "sss" => Algorithm::Sss { steps: self.n_iter },
            "s5" => {
                let schedule = match &self.schedule {
                    Some(s) => s.clone(),
                    None => geometric_schedule(self.l, 3.0, 1.0),
                };
                Algorithm::S5 {
                    iterations_per_level: self.j,
                    screen_size: self.mn,
                    schedule,
                }
            }
            other => anyhow::bail!("unknown algorithm {other}"),
        };
        let cfg = SearchConfig {
            algorithm,
            qn,
            seed,
            screen_residual: Default::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn cov_case(code: u8) -> anyhow::Result<CovCase> {
    Ok(CovCase::from_code(code)?)
}

//! The machine-readable report every command emits.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use s5_core::search::{Ledger, PosteriorSummary};
use s5_core::Model;

/// Stable output schema shared by all commands. Fields that a command does
/// not produce serialize as `null`/empty rather than disappearing.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    /// 0-based column indices of the MAP model.
    pub map_model: Option<Vec<u32>>,
    pub map_score: Option<f64>,
    /// Up to the 50 most probable models with ledger-normalized
    /// probabilities.
    pub posterior: Vec<PosteriorEntry>,
    /// Models with posterior odds against the MAP above 0.001.
    #[serde(rename = "odds_count_0.001")]
    pub odds_count: Option<usize>,
    pub metrics: serde_json::Value,
    pub timing: Timing,
    pub warnings: Vec<String>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct PosteriorEntry {
    pub model: Vec<u32>,
    pub prob: f64,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            config,
            map_model: None,
            map_score: None,
            posterior: Vec::new(),
            odds_count: None,
            metrics: serde_json::Value::Null,
            timing: Timing { wall_seconds: 0.0 },
            warnings: Vec::new(),
            seed,
        }
    }

    pub fn attach_posterior(&mut self, ledger: &Ledger, summary: &PosteriorSummary) {
        self.map_model = Some(summary.map_model().indices().to_vec());
        self.map_score = Some(summary.map_score());
        self.odds_count = Some(summary.odds_count());
        self.posterior = summary
            .top(ledger, 50)
            .into_iter()
            .map(|(m, prob)| PosteriorEntry {
                model: m.indices().to_vec(),
                prob,
            })
            .collect();
    }

    /// Write the JSON document to `output` (stdout when `None`) and print a
    /// one-line human summary on stderr.
    pub fn emit(&self, output: Option<&Path>) -> anyhow::Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        match output {
            Some(path) => {
                let mut f = std::fs::File::create(path)
                    .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
                f.write_all(body.as_bytes())?;
                f.write_all(b"\n")?;
            }
            None => println!("{body}"),
        }

        let human = match (&self.map_model, self.map_score) {
            (Some(m), Some(_)) => {
                let prob = self
                    .posterior
                    .first()
                    .map(|e| e.prob)
                    .unwrap_or(f64::NAN);
                format!(
                    "{}: MAP {} (posterior ~{:.4}) in {:.2}s",
                    self.command,
                    Model::from_sorted(m.clone()),
                    prob,
                    self.timing.wall_seconds
                )
            }
            _ => format!("{}: done in {:.2}s", self.command, self.timing.wall_seconds),
        };
        eprintln!("{human}");
        Ok(())
    }
}

/// Structured error document; emitted on runtime failure before exit 1.
pub fn emit_error(command: &str, err: &anyhow::Error, output: Option<&Path>) {
    let doc = serde_json::json!({
        "command": command,
        "error": format!("{err:#}"),
    });
    let body = serde_json::to_string_pretty(&doc).unwrap_or_else(|_| "{}".into());
    match output {
        Some(path) => {
            let _ = std::fs::write(path, body + "\n");
        }
        None => println!("{body}"),
    }
    eprintln!("{command}: error: {err:#}");
}

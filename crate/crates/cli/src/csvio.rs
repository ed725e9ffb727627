//! CSV ingestion: header row, one named response column, numeric covariates.
//!
//! Constant covariate columns are dropped with a warning rather than
//! aborting the run; the report records which ones were dropped so the
//! remaining column indices stay interpretable.

use std::path::Path;

use s5_core::Dataset;

pub struct LoadedCsv {
    /// Raw (unstandardized) dataset.
    pub data: Dataset,
    /// Covariate names in dataset column order.
    pub names: Vec<String>,
    /// Names of constant columns that were dropped.
    pub dropped: Vec<String>,
}

pub fn load_csv(path: &Path, response: &str) -> anyhow::Result<LoadedCsv> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| anyhow::anyhow!("cannot open {}: {e}", path.display()))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| anyhow::anyhow!("bad header row: {e}"))?
        .iter()
        .map(|s| s.to_string())
        .collect();

    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            anyhow::bail!("duplicated header name {h:?}");
        }
    }
    let resp_idx = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| anyhow::anyhow!("response column {response:?} not found in header"))?;

    let mut y = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len() - 1];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| anyhow::anyhow!("parse error at line {}: {e}", row_idx + 2))?;
        if record.len() != headers.len() {
            anyhow::bail!(
                "parse error at line {}: expected {} fields, got {}",
                row_idx + 2,
                headers.len(),
                record.len()
            );
        }
        let mut ci = 0;
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                anyhow::anyhow!(
                    "parse error at line {}, column {} ({:?}): not a number: {:?}",
                    row_idx + 2,
                    col_idx + 1,
                    headers[col_idx],
                    field
                )
            })?;
            if col_idx == resp_idx {
                y.push(value);
            } else {
                cols[ci].push(value);
                ci += 1;
            }
        }
    }
    if y.len() < 2 {
        anyhow::bail!("need at least 2 data rows, got {}", y.len());
    }

    let mut names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != resp_idx)
        .map(|(_, h)| h.clone())
        .collect();

    // Drop constant columns up front; core standardization treats them as
    // hard errors.
    let n = y.len() as f64;
    let mut dropped = Vec::new();
    let mut kept_cols = Vec::new();
    let mut kept_names = Vec::new();
    for (col, name) in cols.into_iter().zip(names.drain(..)) {
        let mean: f64 = col.iter().sum::<f64>() / n;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        if ss / n <= 1e-20 * (1.0 + mean * mean) {
            dropped.push(name);
        } else {
            kept_cols.push(col);
            kept_names.push(name);
        }
    }
    if kept_cols.is_empty() {
        anyhow::bail!("no usable covariate columns (all constant)");
    }

    let data = Dataset::from_columns(y, kept_cols)?;
    Ok(LoadedCsv {
        data,
        names: kept_names,
        dropped,
    })
}

//! Numerically stable categorical sampling over log scores.

use rand::Rng;

use crate::error::{Error, Result};

/// `log Σ exp(v_i)`, tolerating `-inf` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Draw an index with probability proportional to `exp(log_scores_i / t)`,
/// computed via max subtraction so arbitrarily large scores are safe.
/// Entries at `-inf` carry zero probability; if every entry is `-inf` the
/// draw fails with [`Error::AllNegInfinity`].
pub fn sample_tempered<R: Rng + ?Sized>(
    log_scores: &[f64],
    t: f64,
    rng: &mut R,
) -> Result<usize> {
    assert!(t > 0.0, "temperature must be positive");
    let m = log_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(Error::AllNegInfinity);
    }
    let weights: Vec<f64> = log_scores
        .iter()
        .map(|&s| {
            if s == f64::NEG_INFINITY {
                0.0
            } else {
                ((s - m) / t).exp()
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
            acc += w;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}

//! Shared fixtures for the criterion benchmarks.

use s5_core::sim::{gen_dataset, CovCase, SimDesign};
use s5_core::{Dataset, Model};

/// Standardized synthetic dataset with the default 5-column truth.
pub fn fixture(case: CovCase, n: usize, p: usize, seed: u64) -> (Dataset, Model) {
    let design = SimDesign::new(case, n, p);
    let (raw, _) = gen_dataset(&design, seed, 0).expect("valid design");
    let truth = design.true_model.clone();
    (raw.standardize().expect("standardizable"), truth)
}

//! Synthetic benchmark harness: covariance designs, selection metrics,
//! precision-recall sweeps, prediction error, and search-cost comparison.

mod compare;
mod mspe;
mod prcurve;

pub use compare::{compare_search, CompareRow, SearchTimings};
pub use mspe::{mspe_evaluate, MspeReport};
pub use prcurve::{pr_curve, PrCurve, PrPoint};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::Model;

/// Row covariance structure of the synthetic design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovCase {
    /// `Σ_{jj'} = 0.5` off the diagonal, 1 on it.
    CompoundSymmetry,
    /// `Σ_{jj'} = 0.5^{|j-j'|}`.
    Ar1,
    /// `Σ = I`.
    Isotropic,
}

impl CovCase {
    /// The 1/2/3 labels used in reports.
    pub fn code(&self) -> u8 {
        match self {
            CovCase::CompoundSymmetry => 1,
            CovCase::Ar1 => 2,
            CovCase::Isotropic => 3,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(CovCase::CompoundSymmetry),
            2 => Ok(CovCase::Ar1),
            3 => Ok(CovCase::Isotropic),
            other => Err(Error::Domain(format!("unknown design case {other}"))),
        }
    }
}

/// A synthetic-data recipe: design covariance, dimensions, the true model
/// and coefficient magnitudes, and the noise level.
#[derive(Debug, Clone)]
pub struct SimDesign {
    pub case: CovCase,
    pub n: usize,
    pub p: usize,
    pub true_model: Model,
    /// Coefficient magnitudes; signs are randomized per replicate.
    pub true_beta: Vec<f64>,
    pub sigma: f64,
}

impl SimDesign {
    /// The benchmark defaults: true model `{0,..,4}` with magnitudes
    /// `(0.5, 0.75, 1.0, 1.25, 1.5)` and `σ = 1.5`.
    pub fn new(case: CovCase, n: usize, p: usize) -> Self {
        SimDesign {
            case,
            n,
            p,
            true_model: Model::from_sorted((0..5).collect()),
            true_beta: vec![0.50, 0.75, 1.00, 1.25, 1.50],
            sigma: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.true_beta.len() != self.true_model.size() {
            return Err(Error::InvalidConfig(
                "true_beta length must match the true model size".into(),
            ));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        match self.true_model.indices().last() {
            Some(&j) if (j as usize) >= self.p => Err(Error::InvalidConfig(
                "true model index out of range".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Generate the `n×p` design, column-major, rows i.i.d. `N(0, Σ)`.
///
/// Compound symmetry uses the rank-one construction
/// `x_j = √0.5·z_0 + √0.5·z_j`; AR(1) uses the stationary recursion
/// `x_j = 0.5·x_{j-1} + √0.75·e_j`. Neither ever forms a `p×p` factor.
pub fn gen_design_matrix<R: Rng + ?Sized>(design: &SimDesign, rng: &mut R) -> Vec<f64> {
    let (n, p) = (design.n, design.p);
    let mut x = vec![0.0; n * p];
    let half = 0.5f64.sqrt();
    let ar_noise = 0.75f64.sqrt();
    for i in 0..n {
        match design.case {
            CovCase::CompoundSymmetry => {
                let shared: f64 = StandardNormal.sample(rng);
                for j in 0..p {
                    let z: f64 = StandardNormal.sample(rng);
                    x[j * n + i] = half * shared + half * z;
                }
            }
            CovCase::Ar1 => {
                let mut prev: f64 = StandardNormal.sample(rng);
                x[i] = prev;
                for j in 1..p {
                    let e: f64 = StandardNormal.sample(rng);
                    prev = 0.5 * prev + ar_noise * e;
                    x[j * n + i] = prev;
                }
            }
            CovCase::Isotropic => {
                for j in 0..p {
                    let z: f64 = StandardNormal.sample(rng);
                    x[j * n + i] = z;
                }
            }
        }
    }
    x
}

/// Draw coefficient signs (±1 with probability ½ each), then
/// `y = X_t·(signs ⊙ magnitudes) + σ·ε`. Returns `(y, signed_beta)`.
pub fn gen_response<R: Rng + ?Sized>(
    x: &[f64],
    design: &SimDesign,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let n = design.n;
    let signed: Vec<f64> = design
        .true_beta
        .iter()
        .map(|&b| if rng.random::<bool>() { b } else { -b })
        .collect();
    let mut y = vec![0.0; n];
    for (pos, j) in design.true_model.iter().enumerate() {
        let col = &x[j * n..(j + 1) * n];
        let b = signed[pos];
        for i in 0..n {
            y[i] += b * col[i];
        }
    }
    for item in y.iter_mut() {
        let e: f64 = StandardNormal.sample(rng);
        *item += design.sigma * e;
    }
    (y, signed)
}

/// One full replicate: raw design + response from a replicate-indexed RNG
/// stream. Returns the raw dataset and the signed true coefficients.
pub fn gen_dataset(design: &SimDesign, seed: u64, replicate: u64) -> Result<(Dataset, Vec<f64>)> {
    design.validate()?;
    let mut rng = replicate_rng(seed, replicate);
    let x = gen_design_matrix(design, &mut rng);
    let (y, signed) = gen_response(&x, design, &mut rng);
    let data = Dataset::from_parts(y, x, design.n, design.p)?;
    Ok((data, signed))
}

/// Independent RNG stream for a replicate, derived from the master seed.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate.wrapping_add(1));
    rng
}

/// Confusion counts of a selected model against the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionMetrics {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Set-intersection counts. When nothing is selected the precision is
/// defined as 1.0: an empty selection makes no false claims.
pub fn selection_metrics(selected: &Model, truth: &Model) -> SelectionMetrics {
    let tp = selected.iter().filter(|&j| truth.contains(j as u32)).count();
    let fp = selected.size() - tp;
    let fn_ = truth.size() - tp;
    let precision = if tp + fp == 0 {
        1.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    SelectionMetrics {
        tp,
        fp,
        fn_,
        precision,
        recall,
    }
}

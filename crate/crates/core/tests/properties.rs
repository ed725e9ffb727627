//! Property-based invariants: least-squares against an independent dense
//! solver, ridge bracketing, nested-RSS monotonicity, prior normalization
//! under random hyperparameters, and standardization round trips.

mod common;

use proptest::prelude::*;
use s5_core::marginal::adaptive_log_integral;
use s5_core::priors::{pemom_log_density, pimom_log_density, pimom_log_norm};
use s5_core::{ols_fit, ridge_fit, Dataset, Model};

fn column_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn dataset_strategy(
    n: usize,
    p: usize,
) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (
        column_strategy(n),
        prop::collection::vec(column_strategy(n), p),
    )
}

/// SVD least squares, an independent route from the crate's Cholesky
/// normal equations.
fn svd_ols(data: &Dataset, k: &Model) -> Option<(Vec<f64>, f64)> {
    let n = data.n();
    let m = k.size();
    let mut x = nalgebra::DMatrix::zeros(n, m);
    for (c, j) in k.iter().enumerate() {
        for (r, v) in data.col(j).iter().enumerate() {
            x[(r, c)] = *v;
        }
    }
    let y = nalgebra::DVector::from_column_slice(data.y());
    let svd = x.clone().svd(true, true);
    // reject near-singular systems; those are SingularGram territory
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    if !(smin > 1e-10 * smax.max(1.0)) {
        return None;
    }
    let beta = svd.solve(&y, 0.0).ok()?;
    let resid = &y - &x * &beta;
    Some((beta.as_slice().to_vec(), resid.norm_squared()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ols_matches_generic_dense_solver((y, cols) in dataset_strategy(24, 6)) {
        let d = match Dataset::from_columns(y, cols) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let d = match d.standardize() {
            Ok(d) => d,
            Err(_) => return Ok(()), // constant column: nothing to check
        };
        for idx in [vec![0u32], vec![0, 3], vec![1, 2, 4, 5]] {
            let k = Model::new(idx).unwrap();
            match (ols_fit(&d, &k), svd_ols(&d, &k)) {
                (Ok(fit), Some((qb, qrss))) => {
                    for (a, b) in fit.beta.iter().zip(&qb) {
                        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()),
                            "beta mismatch: {a} vs {b}");
                    }
                    prop_assert!((fit.rss - qrss).abs() <= 1e-8 * (1.0 + qrss),
                        "rss mismatch: {} vs {qrss}", fit.rss);
                }
                _ => {} // singular either way: nothing to compare
            }
        }
    }

    #[test]
    fn ridge_rss_is_at_least_ols_rss((y, cols) in dataset_strategy(16, 4),
                                     tau in 0.01f64..100.0) {
        let d = match Dataset::from_columns(y, cols).and_then(|d| d.standardize()) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let k = Model::new(vec![0, 2]).unwrap();
        if let (Ok(ols), Ok(ridge)) = (ols_fit(&d, &k), ridge_fit(&d, &k, tau)) {
            prop_assert!(ridge.rss >= ols.rss - 1e-9 * (1.0 + ols.rss));
        }
    }

    #[test]
    fn nested_models_never_increase_rss((y, cols) in dataset_strategy(20, 5)) {
        let d = match Dataset::from_columns(y, cols).and_then(|d| d.standardize()) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let nested = [
            Model::empty(),
            Model::new(vec![1]).unwrap(),
            Model::new(vec![1, 3]).unwrap(),
            Model::new(vec![0, 1, 3]).unwrap(),
        ];
        let mut prev = f64::INFINITY;
        for k in &nested {
            if let Ok(fit) = ols_fit(&d, k) {
                prop_assert!(fit.rss <= prev + 1e-9 * (1.0 + prev));
                prev = fit.rss;
            }
        }
    }

    #[test]
    fn standardize_is_idempotent_on_random_data((y, cols) in dataset_strategy(12, 3)) {
        let d = match Dataset::from_columns(y, cols).and_then(|d| d.standardize()) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let d2 = d.standardize().unwrap();
        for j in 0..d.p() {
            for (a, b) in d.col(j).iter().zip(d2.col(j)) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn pemom_density_normalizes_under_random_hyperparameters(
        sigma2 in 0.3f64..4.0,
        tau in 0.3f64..6.0,
    ) {
        // ∫ exp(log density) dβ = 1 to 1e-5 (Gaussian tails: finite range).
        let half_width = 40.0 * (sigma2 * tau).sqrt().max(1.0);
        let v = adaptive_log_integral(
            &|b: f64| pemom_log_density(&[b], sigma2, tau).unwrap(),
            -half_width,
            half_width,
            1e-9,
        );
        prop_assert!(v.abs() <= 1e-5, "log integral = {v}");
    }

    #[test]
    fn pimom_density_normalizes_under_random_hyperparameters(
        tau in 0.3f64..6.0,
        r in 1u32..3,
    ) {
        // Polynomial tails: body plus the u = 1/β tail transform.
        let big = 60.0f64.max(12.0 * tau.sqrt());
        let body = adaptive_log_integral(
            &|b: f64| pimom_log_density(&[b], 1.0, tau, r).unwrap(),
            -big,
            big,
            1e-10,
        );
        let tail = adaptive_log_integral(
            &|u: f64| (2.0 * r as f64 - 2.0) * u.max(1e-300).ln() - tau * u * u,
            0.0,
            1.0 / big,
            1e-10,
        ) + std::f64::consts::LN_2 - pimom_log_norm(tau, r);
        let m = body.max(tail);
        let total = m + ((body - m).exp() + (tail - m).exp()).ln();
        prop_assert!(total.abs() <= 1e-5, "log integral = {total}");
    }
}

//! Laplace approximations to the peMoM and piMoM marginal likelihoods.
//!
//! The approximated integral is `m_k(y) = ∫ exp{f(θ)} dθ` where `θ` is the
//! coefficient vector (plus `σ²` under the inverse-gamma treatment) and `f`
//! is the full log integrand, likelihood × coefficient prior × σ² prior,
//! with every `|k|`-dependent term kept:
//!
//! * peMoM, σ² unknown:
//!   `f(β,σ²) = -(n/2 + |k|/2 + a₀ + 1)·log σ² - (RSS(β)/2 + b₀)/σ²
//!              - βᵀβ/(2σ²τ) - Σ τ/β_j² + |k|(2/σ²)^{1/2}
//!              - (|k|/2)·log(2πτ) - (n/2)·log 2π + a₀ log b₀ - log Γ(a₀)`
//! * piMoM, σ² unknown:
//!   `f(β,σ²) = -(n/2 + a₀ + 1)·log σ² - (RSS(β)/2 + b₀)/σ²
//!              - Σ {r log β_j² + τ/β_j²}
//!              + |k|{(r-1/2)·log τ - log Γ(r-1/2)}
//!              - (n/2)·log 2π + a₀ log b₀ - log Γ(a₀)`
//!
//! The negative Hessian `V = -∇²f` is analytic (and is validated against
//! central finite differences in the test suite). The approximation itself is
//! `log m ≈ (d/2)·log 2π - ½·log|V| + f(mode)` with `d` the true optimization
//! dimension.
//!
//! The expansion is taken at the single mode lying in the orthant of the
//! (clamped) least-squares estimate; with a data-dominant likelihood the
//! `2^{|k|}` mirrored modes are exponentially negligible.

use nalgebra::{Cholesky, DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{self, ModelGram};
use crate::model::Model;
use crate::priors::PriorFamily;

use super::{empty_model_log_marginal, LaplaceResult, ScorerConfig, SigmaMode, LN_2PI};

#[derive(Debug, Clone, Copy)]
enum Family {
    Pemom { tau: f64 },
    Pimom { tau: f64, r: f64 },
}

/// Laplace approximation of the peMoM log marginal likelihood of `k`.
pub fn pemom_log_marginal_laplace(
    data: &Dataset,
    k: &Model,
    cfg: &ScorerConfig,
) -> Result<LaplaceResult> {
    let tau = match cfg.prior {
        PriorFamily::Pemom { tau } => tau,
        _ => return Err(Error::InvalidConfig("scorer config is not peMoM".into())),
    };
    nonlocal_laplace(data, k, Family::Pemom { tau }, cfg)
}

/// Laplace approximation of the piMoM log marginal likelihood of `k`.
pub fn pimom_log_marginal_laplace(
    data: &Dataset,
    k: &Model,
    cfg: &ScorerConfig,
) -> Result<LaplaceResult> {
    let (tau, r) = match cfg.prior {
        PriorFamily::Pimom { tau, r } => (tau, r as f64),
        _ => return Err(Error::InvalidConfig("scorer config is not piMoM".into())),
    };
    nonlocal_laplace(data, k, Family::Pimom { tau, r }, cfg)
}

fn nonlocal_laplace(
    data: &Dataset,
    k: &Model,
    family: Family,
    cfg: &ScorerConfig,
) -> Result<LaplaceResult> {
    cfg.validate()?;
    if k.is_empty() {
        // Pure Gaussian / inverse-gamma integral; exact, no approximation.
        return Ok(LaplaceResult {
            log_marginal: empty_model_log_marginal(data, &cfg.sigma_mode),
            mode: Vec::new(),
            neg_hessian_log_det: 0.0,
            converged: true,
        });
    }
    if k.size() + 1 > data.n() {
        return Err(Error::Domain(format!(
            "model size {} exceeds n-1 = {}",
            k.size(),
            data.n() - 1
        )));
    }

    let mg = ModelGram::new(data, k);
    let obj = Objective {
        family,
        sigma: cfg.sigma_mode,
        n: data.n(),
        m: k.size(),
        mg: &mg,
    };

    let beta_hat = ols_mode_seed(&mg)?;
    let tau = match family {
        Family::Pemom { tau } => tau,
        Family::Pimom { tau, .. } => tau,
    };
    let delta = cfg
        .optimizer
        .clamp_delta
        .unwrap_or_else(|| (tau / data.n() as f64).powf(0.25));

    let mut theta = DVector::zeros(obj.dim());
    for j in 0..k.size() {
        let b = beta_hat[j];
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        theta[j] = sign * b.abs().max(delta);
    }
    if let SigmaMode::InverseGamma { .. } = cfg.sigma_mode {
        let rss = mg.rss_at(&beta_hat).max(0.0);
        let denom = (data.n() - k.size()).max(1) as f64;
        theta[k.size()] = (rss / denom).max(1e-10 * (mg.yty / data.n() as f64).max(1e-300));
    }

    let mut result = newton_ascent(&obj, theta.clone(), &cfg.optimizer);
    if result.is_err() {
        // Retry once from a perturbed start before giving up.
        let perturbed = theta.map(|v| v * 1.5);
        result = newton_ascent(&obj, perturbed, &cfg.optimizer);
    }
    let mode = result?;

    let v = obj.neg_hessian(&mode);
    let chol = Cholesky::new(v).ok_or(Error::SingularHessian)?;
    let mut log_det = 0.0;
    for i in 0..obj.dim() {
        let d = chol.l_dirty()[(i, i)];
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SingularHessian);
        }
        log_det += 2.0 * d.ln();
    }

    let d = obj.dim() as f64;
    let log_marginal = 0.5 * d * LN_2PI - 0.5 * log_det + obj.f(&mode);
    Ok(LaplaceResult {
        log_marginal,
        mode: mode.as_slice().to_vec(),
        neg_hessian_log_det: log_det,
        converged: true,
    })
}

fn ols_mode_seed(mg: &ModelGram) -> Result<DVector<f64>> {
    let chol = mg
        .cholesky(0.0)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    let m = mg.gram.nrows();
    let l = chol.l_dirty();
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for i in 0..m {
        dmin = dmin.min(l[(i, i)]);
        dmax = dmax.max(l[(i, i)]);
    }
    let cond = (dmax / dmin).powi(2);
    if !(dmin > 0.0) || cond > linalg::SINGULAR_CONDITION {
        return Err(Error::SingularGram { cond });
    }
    Ok(chol.solve(&mg.xty))
}

/// The objective `f`, its gradient, and the negative Hessian, over
/// `θ = (β, σ²)` (or just `β` when `σ²` is known).
struct Objective<'a> {
    family: Family,
    sigma: SigmaMode,
    n: usize,
    m: usize,
    mg: &'a ModelGram,
}

impl Objective<'_> {
    fn dim(&self) -> usize {
        match self.sigma {
            SigmaMode::Known(_) => self.m,
            SigmaMode::InverseGamma { .. } => self.m + 1,
        }
    }

    fn split<'t>(&self, theta: &'t DVector<f64>) -> (&'t [f64], f64) {
        match self.sigma {
            SigmaMode::Known(s0) => (&theta.as_slice()[..self.m], s0),
            SigmaMode::InverseGamma { .. } => (&theta.as_slice()[..self.m], theta[self.m]),
        }
    }

    fn f(&self, theta: &DVector<f64>) -> f64 {
        let (beta, s) = self.split(theta);
        if s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let bv = DVector::from_column_slice(beta);
        let rss = self.mg.rss_at(&bv);
        let n = self.n as f64;
        let m = self.m as f64;

        let mut val = match self.sigma {
            SigmaMode::Known(_) => -0.5 * n * (LN_2PI + s.ln()) - rss / (2.0 * s),
            SigmaMode::InverseGamma { a0, b0 } => {
                -0.5 * n * LN_2PI + a0 * b0.ln() - ln_gamma(a0)
                    - (0.5 * n + a0 + 1.0) * s.ln()
                    - (0.5 * rss + b0) / s
            }
        };

        match self.family {
            Family::Pemom { tau } => {
                let mut btb = 0.0;
                for &b in beta {
                    if b == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    btb += b * b;
                    val -= tau / (b * b);
                }
                val -= btb / (2.0 * s * tau);
                // peMoM normalizer: C^{-|k|} = (2πσ²τ)^{-|k|/2} e^{|k|√(2/σ²)}
                val += -0.5 * m * (LN_2PI + tau.ln() + s.ln()) + m * (2.0 / s).sqrt();
            }
            Family::Pimom { tau, r } => {
                for &b in beta {
                    if b == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    val -= 2.0 * r * b.abs().ln() + tau / (b * b);
                }
                val += m * ((r - 0.5) * tau.ln() - ln_gamma(r - 0.5));
            }
        }
        val
    }

    fn grad(&self, theta: &DVector<f64>) -> DVector<f64> {
        let (beta, s) = self.split(theta);
        let bv = DVector::from_column_slice(beta);
        let resid_proj = &self.mg.xty - &self.mg.gram * &bv; // X_kᵀ(y - X_kβ)
        let n = self.n as f64;
        let m = self.m as f64;

        let mut g = DVector::zeros(self.dim());
        for j in 0..self.m {
            let b = beta[j];
            g[j] = resid_proj[j] / s + 2.0 * tau_of(self.family) / (b * b * b);
            match self.family {
                Family::Pemom { tau } => g[j] -= b / (s * tau),
                Family::Pimom { r, .. } => g[j] -= 2.0 * r / b,
            }
        }

        if let SigmaMode::InverseGamma { a0, b0 } = self.sigma {
            let rss = self.mg.rss_at(&bv);
            let mut gs = -(0.5 * n + a0 + 1.0) / s + (0.5 * rss + b0) / (s * s);
            if let Family::Pemom { tau } = self.family {
                let btb: f64 = beta.iter().map(|b| b * b).sum();
                gs += -0.5 * m / s + btb / (2.0 * s * s * tau)
                    - (m / std::f64::consts::SQRT_2) * s.powf(-1.5);
            }
            g[self.m] = gs;
        }
        g
    }

    /// `V = -∇²f`, assembled analytically.
    fn neg_hessian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let (beta, s) = self.split(theta);
        let bv = DVector::from_column_slice(beta);
        let n = self.n as f64;
        let m = self.m as f64;
        let tau = tau_of(self.family);

        let mut v = DMatrix::zeros(self.dim(), self.dim());
        for a in 0..self.m {
            for b in 0..self.m {
                v[(a, b)] = self.mg.gram[(a, b)] / s;
            }
            let ba = beta[a];
            v[(a, a)] += 6.0 * tau / ba.powi(4);
            match self.family {
                Family::Pemom { tau } => v[(a, a)] += 1.0 / (s * tau),
                Family::Pimom { r, .. } => v[(a, a)] -= 2.0 * r / (ba * ba),
            }
        }

        if let SigmaMode::InverseGamma { a0, b0 } = self.sigma {
            let resid_proj = &self.mg.xty - &self.mg.gram * &bv;
            let rss = self.mg.rss_at(&bv);
            for j in 0..self.m {
                let mut vjs = resid_proj[j] / (s * s);
                if let Family::Pemom { tau } = self.family {
                    vjs -= beta[j] / (s * s * tau);
                }
                v[(j, self.m)] = vjs;
                v[(self.m, j)] = vjs;
            }
            let mut vss =
                -(0.5 * n + a0 + 1.0) / (s * s) + (rss + 2.0 * b0) / (s * s * s);
            if let Family::Pemom { tau } = self.family {
                let btb: f64 = beta.iter().map(|b| b * b).sum();
                vss += -0.5 * m / (s * s) + btb / (s * s * s * tau)
                    - (1.5 * m / std::f64::consts::SQRT_2) * s.powf(-2.5);
            }
            v[(self.m, self.m)] = vss;
        }
        v
    }
}

fn tau_of(family: Family) -> f64 {
    match family {
        Family::Pemom { tau } => tau,
        Family::Pimom { tau, .. } => tau,
    }
}

/// Newton ascent with a backtracking line search. Steps are capped so that no
/// coefficient crosses zero (the objective has a barrier there) and `σ²`
/// stays positive.
fn newton_ascent(
    obj: &Objective<'_>,
    mut theta: DVector<f64>,
    opt: &super::OptimizerConfig,
) -> Result<DVector<f64>> {
    let dim = obj.dim();
    let has_sigma = dim > obj.m;
    let mut fval = obj.f(&theta);
    if !fval.is_finite() {
        return Err(Error::NonConvergence(0));
    }

    for _ in 0..opt.max_iter {
        let g = obj.grad(&theta);
        if g.amax() <= opt.grad_tol {
            return Ok(theta);
        }

        let v = obj.neg_hessian(&theta);
        let step = solve_step(&v, &g);

        // Cap the step at 90% of the distance to any barrier.
        let mut alpha: f64 = 1.0;
        for j in 0..obj.m {
            if step[j] != 0.0 && theta[j] * (theta[j] + step[j]) <= 0.0 {
                alpha = alpha.min(0.9 * theta[j].abs() / step[j].abs());
            }
        }
        if has_sigma && step[obj.m] < 0.0 {
            let limit = 0.9 * theta[obj.m] / (-step[obj.m]);
            alpha = alpha.min(limit);
        }

        let mut accepted = false;
        for _ in 0..50 {
            let cand = &theta + &step * alpha;
            let fc = obj.f(&cand);
            if fc.is_finite() && fc > fval {
                theta = cand;
                fval = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // Stalled line search: converged if the gradient is already
            // small on the scale of the objective, else give up.
            if g.amax() <= opt.grad_tol.max(1e-6) {
                return Ok(theta);
            }
            return Err(Error::NonConvergence(opt.max_iter));
        }
    }

    let g = obj.grad(&theta);
    if g.amax() <= opt.grad_tol.max(1e-6) {
        Ok(theta)
    } else {
        Err(Error::NonConvergence(opt.max_iter))
    }
}

/// Solve `V·d = g` for the ascent direction, adding Levenberg jitter until
/// the system is positive definite.
fn solve_step(v: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let dim = v.nrows();
    let scale = (0..dim)
        .map(|i| v[(i, i)].abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut jitter = 0.0;
    for _ in 0..60 {
        let mut a = v.clone();
        if jitter > 0.0 {
            for i in 0..dim {
                a[(i, i)] += jitter;
            }
        }
        if let Some(chol) = Cholesky::new(a) {
            return chol.solve(g);
        }
        jitter = if jitter == 0.0 { 1e-10 * scale } else { jitter * 10.0 };
    }
    // Last resort: diagonal-scaled gradient.
    DVector::from_fn(dim, |i, _| g[i] / v[(i, i)].abs().max(1e-8 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::ModelPrior;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn synth(n: usize, beta: &[f64], sigma: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = beta.len().max(2);
        let mut cols = Vec::new();
        for _ in 0..p {
            let c: Vec<f64> = (0..n)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            cols.push(c);
        }
        let mut y = vec![0.0; n];
        for (j, b) in beta.iter().enumerate() {
            for i in 0..n {
                y[i] += b * cols[j][i];
            }
        }
        for item in y.iter_mut() {
            *item += sigma
                * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        }
        Dataset::from_columns(y, cols)
            .unwrap()
            .standardize()
            .unwrap()
    }

    fn cfg(prior: PriorFamily) -> ScorerConfig {
        ScorerConfig::new(prior, ModelPrior::UniformRestricted { qn: 10 })
    }

    #[test]
    fn mode_is_stationary() {
        let d = synth(200, &[1.5], 1.0, 3);
        let k = Model::from_sorted(vec![0]);
        for c in [
            cfg(PriorFamily::Pemom { tau: 2.0 }),
            cfg(PriorFamily::Pimom { tau: 2.0, r: 1 }),
        ] {
            for sigma in [SigmaMode::InverseGamma { a0: 0.1, b0: 0.1 }, SigmaMode::Known(1.0)] {
                let mut c2 = c.clone();
                c2.sigma_mode = sigma;
                let res = match c2.prior {
                    PriorFamily::Pemom { .. } => pemom_log_marginal_laplace(&d, &k, &c2).unwrap(),
                    _ => pimom_log_marginal_laplace(&d, &k, &c2).unwrap(),
                };
                assert!(res.converged);
                let mg = ModelGram::new(&d, &k);
                let fam = match c2.prior {
                    PriorFamily::Pemom { tau } => Family::Pemom { tau },
                    PriorFamily::Pimom { tau, r } => Family::Pimom { tau, r: r as f64 },
                    _ => unreachable!(),
                };
                let obj = Objective {
                    family: fam,
                    sigma: c2.sigma_mode,
                    n: d.n(),
                    m: 1,
                    mg: &mg,
                };
                let theta = DVector::from_column_slice(&res.mode);
                assert!(
                    obj.grad(&theta).amax() <= 1e-6,
                    "gradient not stationary: {}",
                    obj.grad(&theta).amax()
                );
            }
        }
    }

    #[test]
    fn analytic_hessian_matches_finite_differences() {
        let d = synth(120, &[1.2, -0.8], 1.0, 11);
        let k = Model::from_sorted(vec![0, 1]);
        let mg = ModelGram::new(&d, &k);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for fam in [Family::Pemom { tau: 2.5 }, Family::Pimom { tau: 2.5, r: 1.0 }] {
            for sigma in [SigmaMode::InverseGamma { a0: 0.1, b0: 0.1 }, SigmaMode::Known(0.9)] {
                let obj = Objective {
                    family: fam,
                    sigma,
                    n: d.n(),
                    m: 2,
                    mg: &mg,
                };
                for _ in 0..20 {
                    let mut theta = DVector::zeros(obj.dim());
                    for j in 0..2 {
                        let u: f64 = <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut rng,
                        );
                        theta[j] = 0.8 + 0.3 * u.abs();
                        if j == 1 {
                            theta[j] = -theta[j];
                        }
                    }
                    if obj.dim() > 2 {
                        let u: f64 = <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut rng,
                        );
                        theta[2] = 1.0 + 0.2 * u.abs();
                    }
                    let v = obj.neg_hessian(&theta);
                    // central finite differences of the gradient
                    for col in 0..obj.dim() {
                        let h = 1e-5 * theta[col].abs().max(1e-3);
                        let mut tp = theta.clone();
                        tp[col] += h;
                        let mut tm = theta.clone();
                        tm[col] -= h;
                        let gp = obj.grad(&tp);
                        let gm = obj.grad(&tm);
                        for row in 0..obj.dim() {
                            let fd = -(gp[row] - gm[row]) / (2.0 * h);
                            let denom = v[(row, col)].abs().max(1.0);
                            assert!(
                                (v[(row, col)] - fd).abs() / denom <= 1e-4,
                                "V[{row},{col}]: analytic {} vs fd {fd}",
                                v[(row, col)]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_model_is_exact_gaussian_inverse_gamma_integral() {
        let d = synth(50, &[0.0], 1.0, 5);
        let c = cfg(PriorFamily::Pemom { tau: 2.0 });
        let res = pemom_log_marginal_laplace(&d, &Model::empty(), &c).unwrap();
        // Independent recomputation of the closed form.
        let n = d.n() as f64;
        let expect = -0.5 * n * LN_2PI + 0.1 * 0.1f64.ln() - ln_gamma(0.1)
            + ln_gamma(0.5 * n + 0.1)
            - (0.5 * n + 0.1) * (0.1 + 0.5 * d.yty()).ln();
        approx::assert_abs_diff_eq!(res.log_marginal, expect, epsilon = 1e-10);
    }

    #[test]
    fn pimom_small_tau_limit_matches_analytic_kernel_difference() {
        // As τ → 0+ with r=1 the piMoM penalty at fixed β approaches
        // -2log|β| - log Γ(1/2) + (1/2)log τ, so the score difference between
        // two fixed models approaches the OLS-likelihood difference plus the
        // log-kernel difference.
        // Large n keeps the O(1/n) mode-shift terms below the tolerance.
        let d = synth(2000, &[2.0, 1.5], 0.8, 21);
        let k1 = Model::from_sorted(vec![0]);
        let k2 = Model::from_sorted(vec![0, 1]);
        let s0 = 0.64;
        let mut c = cfg(PriorFamily::Pimom { tau: 1e-8, r: 1 });
        c.sigma_mode = SigmaMode::Known(s0);
        let l1 = pimom_log_marginal_laplace(&d, &k1, &c).unwrap();
        let l2 = pimom_log_marginal_laplace(&d, &k2, &c).unwrap();
        let observed = l2.log_marginal - l1.log_marginal;

        // Analytic limit: Laplace at the OLS mode with the prior kernel
        // evaluated there; the Gaussian curvature comes from the likelihood
        // alone, so each model contributes
        //   loglik(β̂) + Σ_j {-2 log|β̂_j| - log Γ(1/2) + (1/2) log τ}
        //   + (|k|/2) log 2π - (1/2) log|X'X/σ²|  (τ/β̂² → 0).
        let tau: f64 = 1e-8;
        let lim = |k: &Model| -> f64 {
            let fit = crate::linalg::ols_fit(&d, k).unwrap();
            let loglik = -0.5 * d.n() as f64 * (LN_2PI + s0.ln()) - fit.rss / (2.0 * s0);
            let mg = ModelGram::new(&d, k);
            let scaled = &mg.gram / s0;
            let det = Cholesky::new(scaled).unwrap();
            let mut logdet = 0.0;
            for i in 0..k.size() {
                logdet += 2.0 * det.l_dirty()[(i, i)].ln();
            }
            let kernel: f64 = fit
                .beta
                .iter()
                .map(|b| -2.0 * b.abs().ln() - ln_gamma(0.5) + 0.5 * tau.ln())
                .sum();
            loglik + kernel + 0.5 * k.size() as f64 * LN_2PI - 0.5 * logdet
        };
        let expected = lim(&k2) - lim(&k1);
        assert!(
            (observed - expected).abs() < 3e-3,
            "observed {observed}, analytic limit {expected}"
        );
    }

    #[test]
    fn degenerate_gram_reports_singular() {
        let c = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let d =
            Dataset::from_columns(vec![1.0, 0.0, 1.0, 0.0, 1.0], vec![c.clone(), c]).unwrap();
        let conf = cfg(PriorFamily::Pemom { tau: 2.0 });
        assert!(matches!(
            pemom_log_marginal_laplace(&d, &Model::from_sorted(vec![0, 1]), &conf),
            Err(Error::SingularGram { .. })
        ));
    }
}

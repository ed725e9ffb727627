//! Adaptive quadrature oracle for marginal likelihoods of tiny models.
//!
//! Integrates likelihood × prior directly (in log space, tensor products of
//! 1-D adaptive Gauss–Kronrod rules) so Laplace approximations can be checked
//! against an independent route. Supports `|k| ≤ 2`; the error-variance
//! dimension, when present, is handled innermost on a log scale.

use nalgebra::DVector;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::ModelGram;
use crate::model::Model;
use crate::priors::{gprior_log_density, pemom_log_density, pimom_log_density, PriorFamily};

use super::{ScorerConfig, SigmaMode, LN_2PI};

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
const KRONROD_NODES: [f64; 15] = [
    -0.991455371120813,
    -0.949107912342759,
    -0.864864423359769,
    -0.741531185599394,
    -0.586087235467691,
    -0.405845151377397,
    -0.207784955007898,
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];
const KRONROD_WEIGHTS: [f64; 15] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];
const GAUSS_WEIGHTS: [f64; 7] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
    0.381830050505119,
    0.279705391489277,
    0.129484966168870,
];

/// `log ∫_a^b exp{g(x)} dx` by adaptive Gauss–Kronrod bisection.
///
/// `log_f` is the log integrand; the integral is computed on a max-shifted
/// scale so the result is immune to overflow. `tol` is the absolute target
/// in log space.
pub fn adaptive_log_integral(log_f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(b > a, "empty integration range");
    // Locate the integrand's rough maximum for the shift.
    let mut shift = f64::NEG_INFINITY;
    let probes = 64;
    for i in 0..=probes {
        let x = a + (b - a) * i as f64 / probes as f64;
        let v = log_f(x);
        if v > shift {
            shift = v;
        }
    }
    if !shift.is_finite() {
        return f64::NEG_INFINITY;
    }

    struct Interval {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    fn gk15(log_f: &dyn Fn(f64) -> f64, shift: f64, a: f64, b: f64) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut kronrod = 0.0;
        let mut gauss = 0.0;
        for (i, (&node, &wk)) in KRONROD_NODES.iter().zip(&KRONROD_WEIGHTS).enumerate() {
            let lv = log_f(mid + half * node);
            let v = if lv == f64::NEG_INFINITY { 0.0 } else { (lv - shift).exp() };
            kronrod += wk * v;
            if i % 2 == 1 {
                gauss += GAUSS_WEIGHTS[i / 2] * v;
            }
        }
        let value = kronrod * half;
        let error = ((kronrod - gauss) * half).abs();
        (value, error)
    }

    let (v0, e0) = gk15(log_f, shift, a, b);
    let mut intervals = vec![Interval {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let max_intervals = 4000;
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.value).sum();
        let err: f64 = intervals.iter().map(|iv| iv.error).sum();
        if err <= tol * total.abs().max(1e-300) || intervals.len() >= max_intervals {
            if total <= 0.0 {
                return f64::NEG_INFINITY;
            }
            return total.ln() + shift;
        }
        // Split the worst interval.
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let iv = intervals.swap_remove(worst);
        let mid = 0.5 * (iv.a + iv.b);
        let (vl, el) = gk15(log_f, shift, iv.a, mid);
        let (vr, er) = gk15(log_f, shift, mid, iv.b);
        intervals.push(Interval {
            a: iv.a,
            b: mid,
            value: vl,
            error: el,
        });
        intervals.push(Interval {
            a: mid,
            b: iv.b,
            value: vr,
            error: er,
        });
    }
}

/// Log marginal likelihood of `k` by direct numerical integration of
/// likelihood × prior. The oracle counterpart of the Laplace path; only
/// `|k| ≤ 2` is supported.
pub fn quadrature_log_marginal(data: &Dataset, k: &Model, cfg: &ScorerConfig) -> Result<f64> {
    cfg.validate()?;
    let m = k.size();
    if m > 2 {
        return Err(Error::DimensionTooLarge(m));
    }
    if matches!(cfg.prior, PriorFamily::GPrior { .. })
        && matches!(cfg.sigma_mode, SigmaMode::Known(_))
    {
        return Err(Error::InvalidConfig(
            "the g-prior marginal is defined with sigma^2 integrated out".into(),
        ));
    }
    if m == 0 {
        return match cfg.sigma_mode {
            // One smooth positive integrand; integrate it numerically so the
            // oracle stays a genuinely independent route.
            SigmaMode::InverseGamma { .. } => {
                if matches!(cfg.prior, PriorFamily::GPrior { .. }) {
                    return Ok(gprior_exact_empty(data));
                }
                let n = data.n() as f64;
                let yty = data.yty();
                let log_f = |u: f64| -> f64 {
                    let s = u.exp();
                    loglik_gaussian(n, yty, s) + log_ig(&cfg.sigma_mode, s) + u
                };
                let center = (yty / n).max(1e-12).ln();
                Ok(adaptive_log_integral(&log_f, center - 20.0, center + 20.0, 1e-9))
            }
            SigmaMode::Known(s0) => Ok(loglik_gaussian(data.n() as f64, data.yty(), s0)),
        };
    }

    let mg = ModelGram::new(data, k);
    let chol = mg
        .cholesky(0.0)
        .ok_or(Error::SingularGram { cond: f64::INFINITY })?;
    let beta_hat = chol.solve(&mg.xty);
    let rss_hat = mg.rss_at(&beta_hat).max(0.0);
    let s_hat = (rss_hat / (data.n() - m) as f64).max(1e-12);
    // Posterior coefficient scale from the inverse Gram diagonal.
    let inv = chol.inverse();
    let sd: Vec<f64> = (0..m).map(|j| (inv[(j, j)] * s_hat).sqrt()).collect();

    let n = data.n() as f64;
    let rss = |beta: &[f64]| -> f64 {
        let bv = DVector::from_column_slice(beta);
        mg.rss_at(&bv).max(0.0)
    };

    // Log joint density at (beta, s): likelihood x coefficient prior
    // (x sigma prior when integrated).
    let log_joint = |beta: &[f64], s: f64| -> f64 {
        let ll = match cfg.prior {
            // Centered-intercept likelihood for the g-prior route.
            PriorFamily::GPrior { .. } => {
                -0.5 * (n - 1.0) * (LN_2PI + s.ln()) - rss(beta) / (2.0 * s)
            }
            _ => loglik_gaussian_rss(n, rss(beta), s),
        };
        let lp = match cfg.prior {
            PriorFamily::Pemom { tau } => pemom_log_density(beta, s, tau).unwrap(),
            PriorFamily::Pimom { tau, r } => pimom_log_density(beta, s, tau, r).unwrap(),
            PriorFamily::GPrior { g } => gprior_log_density(beta, s, g, data, k).unwrap(),
            PriorFamily::ReducedRlasso { .. } => {
                unreachable!("rlasso has no marginal likelihood")
            }
        };
        ll + lp
    };

    if matches!(cfg.prior, PriorFamily::ReducedRlasso { .. }) {
        return Err(Error::InvalidConfig(
            "reduced rlasso is a loss, not a marginal likelihood".into(),
        ));
    }

    // Integration ranges for each coefficient.
    let tau_scale = match cfg.prior {
        PriorFamily::Pemom { tau } | PriorFamily::Pimom { tau, .. } => tau.sqrt(),
        _ => 0.0,
    };
    let range = |j: usize| -> (f64, f64) {
        let w = (12.0 * sd[j]).max(1.5 * beta_hat[j].abs()).max(0.5 * tau_scale).max(0.5);
        (beta_hat[j] - w, beta_hat[j] + w)
    };

    let s_center = s_hat.ln();
    let (s_lo, s_hi) = (s_center - 20.0, s_center + 20.0);

    // The g-prior closed form is derived under the Jeffreys prior
    // π(σ²) ∝ 1/σ²; the nonlocal priors use the configured inverse gamma.
    let sigma_log_prior = |s: f64| -> f64 {
        if matches!(cfg.prior, PriorFamily::GPrior { .. }) {
            -s.ln()
        } else {
            log_ig(&cfg.sigma_mode, s)
        }
    };
    let with_sigma = |beta: &[f64]| -> f64 {
        match cfg.sigma_mode {
            SigmaMode::Known(s0) => log_joint(beta, s0),
            SigmaMode::InverseGamma { .. } => {
                let log_f =
                    |u: f64| -> f64 { log_joint(beta, u.exp()) + sigma_log_prior(u.exp()) + u };
                adaptive_log_integral(&log_f, s_lo, s_hi, 1e-9)
            }
        }
    };

    let (a0, b0) = range(0);
    let value = if m == 1 {
        adaptive_log_integral(&|b: f64| with_sigma(&[b]), a0, b0, 1e-8)
    } else {
        let (a1, b1) = range(1);
        let outer = |b_outer: f64| -> f64 {
            adaptive_log_integral(&|b_inner: f64| with_sigma(&[b_outer, b_inner]), a1, b1, 1e-8)
        };
        adaptive_log_integral(&outer, a0, b0, 1e-7)
    };
    Ok(value)
}

fn loglik_gaussian(n: f64, yty: f64, s: f64) -> f64 {
    -0.5 * n * (LN_2PI + s.ln()) - yty / (2.0 * s)
}

fn loglik_gaussian_rss(n: f64, rss: f64, s: f64) -> f64 {
    -0.5 * n * (LN_2PI + s.ln()) - rss / (2.0 * s)
}

fn log_ig(mode: &SigmaMode, s: f64) -> f64 {
    match *mode {
        SigmaMode::InverseGamma { a0, b0 } => {
            use statrs::function::gamma::ln_gamma;
            a0 * b0.ln() - ln_gamma(a0) - (a0 + 1.0) * s.ln() - b0 / s
        }
        SigmaMode::Known(_) => 0.0,
    }
}

/// Exact empty-model marginal for the g-prior route (Jeffreys σ², centered
/// intercept): the quadrature integrand has no coefficient to integrate.
fn gprior_exact_empty(data: &Dataset) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let n = data.n() as f64;
    let yty = data.yty();
    -0.5 * (n - 1.0) * LN_2PI + ln_gamma(0.5 * (n - 1.0)) - 0.5 * (n - 1.0) * (0.5 * yty).ln()
}

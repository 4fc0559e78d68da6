use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hill::{default_hill_k, hill_estimator_weighted};
use crate::error::{Error, Result};
use crate::gb2::Gb2Params;
use crate::optim::{bfgs, hessian, nelder_mead, BfgsOptions, SimplexOptions};
use crate::special::{ln_beta, softplus};

pub const MIN_FIT_SAMPLES: usize = 50;

/// Bound on |ln μ|, |ln ν|, |ln q|; optima on the bound are reported as
/// non-converged.
const LOG_SHAPE_BOUND: f64 = 7.0;
const LOG_SCALE_BOUND: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Number of simplex starts.
    pub starts: usize,
    /// Restrict the fit to samples in `[lo, hi]`, using the likelihood
    /// truncated to that window.
    pub window: Option<(f64, f64)>,
    /// Relative change of the log-likelihood that counts as converged.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            window: None,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Gb2Params,
    /// Total (weighted) log-likelihood at `params`.
    pub log_likelihood: f64,
    /// Number of observations inside the fit window.
    pub n_used: usize,
    pub converged: bool,
    /// Standard error of μ from the observed information; infinite when the
    /// information matrix is not positive definite.
    pub se_mu: f64,
}

struct Prepared {
    ln_x: Vec<f64>,
    w: Vec<f64>,
    total_w: f64,
    center: f64,
    window: Option<(f64, f64)>,
}

impl Prepared {
    fn params(&self, th: &[f64]) -> Option<Gb2Params> {
        if th[..3].iter().any(|v| v.abs() > LOG_SHAPE_BOUND) || th[3].abs() > LOG_SCALE_BOUND {
            return None;
        }
        Gb2Params::new(
            th[0].exp(),
            th[1].exp(),
            th[2].exp(),
            (self.center + th[3]).exp(),
        )
        .ok()
    }

    /// Mean negative log-likelihood per unit weight.
    fn objective(&self, th: &[f64]) -> f64 {
        let Some(p) = self.params(th) else {
            return f64::INFINITY;
        };
        let (mu, nu, q) = (p.mu(), p.nu(), p.q());
        let ln_c1 = self.center + th[3];
        let ln_norm = q.ln() - ln_beta(mu / q, nu / q);
        let expo = (mu + nu) / q;
        let mut acc = 0.0;
        for (&lx, &w) in self.ln_x.iter().zip(&self.w) {
            let t = lx - ln_c1;
            acc += w * (nu * t - expo * softplus(q * t) - lx);
        }
        let mut ll = acc / self.total_w + ln_norm;
        if let Some((lo, hi)) = self.window {
            let mass = p.cdf_upper(lo).unwrap_or(1.0) - p.cdf_upper(hi).unwrap_or(0.0);
            if !(mass > 0.0) {
                return f64::INFINITY;
            }
            ll -= mass.ln();
        }
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    }
}

/// Maximum-likelihood GB2 fit with default options.
pub fn fit_gb2_mle(samples: &[f64]) -> Result<FitResult> {
    fit_gb2_mle_with(samples, None, &FitOptions::default())
}

/// Maximum-likelihood GB2 fit, optionally weighted (each value counted
/// `weights[i]` times) and optionally truncated to a window.
///
/// The search runs in log-parameters: several Nelder–Mead starts around a
/// Hill/median initialization, then a BFGS polish of the best one. The
/// result does not depend on the order of the input.
pub fn fit_gb2_mle_with(
    samples: &[f64],
    weights: Option<&[f64]>,
    opts: &FitOptions,
) -> Result<FitResult> {
    if let Some(w) = weights {
        if w.len() != samples.len() {
            return Err(Error::Domain("samples and weights differ in length".into()));
        }
        if w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain(
                "weights must be finite and non-negative".into(),
            ));
        }
    }
    if let Some(bad) = samples.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!(
            "samples must be positive and finite, found {bad}"
        )));
    }
    let (lo, hi) = opts.window.unwrap_or((0.0, f64::INFINITY));
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::Domain(format!("invalid fit window [{lo}, {hi}]")));
    }

    let mut pairs: Vec<(f64, f64)> = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, weights.map_or(1.0, |w| w[i])))
        .filter(|&(x, w)| w > 0.0 && x >= lo && x <= hi)
        .collect();
    if pairs.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: pairs.len(),
        });
    }
    // Canonical order makes every floating-point sum permutation invariant.
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n_used = pairs.len();
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let wts: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let total_w: f64 = wts.iter().sum();

    let median = weighted_median(&values, &wts, total_w);
    if values[0] == values[n_used - 1] {
        return Ok(FitResult {
            params: Gb2Params::new(1.0, 1.0, 1.0, median)?,
            log_likelihood: f64::NAN,
            n_used,
            converged: false,
            se_mu: f64::INFINITY,
        });
    }

    let prep = Prepared {
        ln_x: values.iter().map(|x| x.ln()).collect(),
        w: wts.clone(),
        total_w,
        center: median.ln(),
        window: opts.window,
    };

    let k = default_hill_k(n_used) as f64 * total_w / n_used as f64;
    let mu0 = hill_estimator_weighted(&values, &wts, k)
        .unwrap_or(2.0)
        .clamp(0.2, 20.0);
    let inv: Vec<f64> = values.iter().map(|x| 1.0 / x).collect();
    let nu0 = hill_estimator_weighted(&inv, &wts, k)
        .unwrap_or(1.0)
        .clamp(0.2, 20.0);

    let starts = start_points(mu0, nu0, opts.starts.max(1));
    let simplex = SimplexOptions {
        ftol: opts.tol,
        ..SimplexOptions::default()
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|th| nelder_mead(|x| prep.objective(x), th, simplex))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    let simplex_best = &runs[best];
    let polish = bfgs(
        |x| prep.objective(x),
        &simplex_best.x,
        BfgsOptions {
            ftol: opts.tol * 1e-2,
            ..BfgsOptions::default()
        },
    );
    let (theta, value) = if polish.value <= simplex_best.value {
        (polish.x.clone(), polish.value)
    } else {
        (simplex_best.x.clone(), simplex_best.value)
    };

    let Some(params) = prep.params(&theta) else {
        return Ok(FitResult {
            params: Gb2Params::new(mu0, nu0, 1.0, median)?,
            log_likelihood: f64::NAN,
            n_used,
            converged: false,
            se_mu: f64::INFINITY,
        });
    };
    let log_likelihood = -value * total_w;
    let interior = theta[..3].iter().all(|v| v.abs() < LOG_SHAPE_BOUND - 0.5)
        && theta[3].abs() < LOG_SCALE_BOUND - 1.0;
    let se_mu = standard_error_mu(&prep, &theta, total_w);
    let converged = simplex_best.converged
        && (polish.converged || polish.value >= simplex_best.value)
        && interior
        && log_likelihood.is_finite()
        && se_mu.is_finite();

    Ok(FitResult {
        params,
        log_likelihood,
        n_used,
        converged,
        se_mu: if converged { se_mu } else { f64::INFINITY },
    })
}

fn start_points(mu0: f64, nu0: f64, count: usize) -> Vec<Vec<f64>> {
    const Q: [f64; 4] = [1.0, 0.5, 2.0, 4.0];
    const SHRINK: [f64; 2] = [1.0, 0.6];
    (0..count)
        .map(|i| {
            let q = Q[i % 4];
            let s = SHRINK[(i / 4) % 2];
            vec![(mu0 * s).ln(), (nu0 * s).ln(), q.ln(), 0.0]
        })
        .collect()
}

fn weighted_median(sorted: &[f64], w: &[f64], total: f64) -> f64 {
    let mut cum = 0.0;
    for (x, wi) in sorted.iter().zip(w) {
        cum += wi;
        if cum >= 0.5 * total {
            return *x;
        }
    }
    sorted[sorted.len() - 1]
}

/// `μ · sd(ln μ)` from the inverse observed information in log-parameters.
fn standard_error_mu(prep: &Prepared, theta: &[f64], total_w: f64) -> f64 {
    let h = hessian(&|x: &[f64]| prep.objective(x) * total_w, theta, 1e-4);
    let m = DMatrix::from_fn(4, 4, |i, j| h[i][j]);
    let Some(chol) = m.cholesky() else {
        return f64::INFINITY;
    };
    let cov = chol.inverse();
    let var = cov[(0, 0)];
    if var > 0.0 && var.is_finite() {
        theta[0].exp() * var.sqrt()
    } else {
        f64::INFINITY
    }
}

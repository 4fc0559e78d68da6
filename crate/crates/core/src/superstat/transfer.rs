use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check(mu_f: f64, delta: f64) -> Result<()> {
    if !(delta < 1.0) {
        return Err(Error::Normalizability(format!(
            "demand law needs delta < 1, got {delta}"
        )));
    }
    if !mu_f.is_finite() {
        return Err(Error::OutOfTheory(format!(
            "mu_F must be finite, got {mu_f}"
        )));
    }
    Ok(())
}

/// Small-β exponent `γ` of the temperature weight implied by the demand
/// exponent `δ`: `γ = δ` for `μ_F ≥ 2`, `γ = 1 + (μ_F − 1)(δ − 1)` below.
pub fn gamma_from_delta(delta: f64, mu_f: f64) -> Result<f64> {
    check(mu_f, delta)?;
    if !(mu_f > 1.0) {
        return Err(Error::OutOfTheory(format!("needs mu_F > 1, got {mu_f}")));
    }
    Ok(if mu_f >= 2.0 {
        delta
    } else {
        1.0 + (mu_f - 1.0) * (delta - 1.0)
    })
}

/// Worker-level Pareto index from the firm-level one.
///
/// `μ_W = μ_F − δ + 1` for `μ_F > 2` and `μ_W = μ_F + (μ_F − 1)(1 − δ)` for
/// `1 < μ_F ≤ 2`. At `μ_F = 1` this returns the fixed point 1.
pub fn predict_mu_w(mu_f: f64, delta: f64) -> Result<f64> {
    check(mu_f, delta)?;
    if !(mu_f >= 1.0) {
        return Err(Error::OutOfTheory(format!("needs mu_F > 1, got {mu_f}")));
    }
    Ok(if mu_f > 2.0 {
        mu_f - delta + 1.0
    } else {
        mu_f + (mu_f - 1.0) * (1.0 - delta)
    })
}

/// Inverse of [`predict_mu_w`] in its first argument: the lower-level index
/// that maps onto `mu_w`. Iterating it walks down toward 1 without crossing.
pub fn predict_mu_f(mu_w: f64, delta: f64) -> Result<f64> {
    check(mu_w, delta)?;
    if !(mu_w >= 1.0) {
        return Err(Error::OutOfTheory(format!("needs mu_W >= 1, got {mu_w}")));
    }
    Ok(if mu_w > 3.0 - delta {
        mu_w + delta - 1.0
    } else {
        (mu_w + 1.0 - delta) / (2.0 - delta)
    })
}

/// Demand exponent recovered from a pair of fitted indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// False when `μ_W ≤ μ_F`, which the theory excludes; `delta` is then ≥ 1.
    pub consistent: bool,
}

/// `δ = μ_F − μ_W + 1` for `μ_F > 2`, `δ = 1 − (μ_W − μ_F)/(μ_F − 1)` for
/// `1 < μ_F ≤ 2`.
pub fn infer_delta(mu_f: f64, mu_w: f64) -> Result<DeltaEstimate> {
    if !(mu_f > 1.0 && mu_f.is_finite()) {
        return Err(Error::OutOfTheory(format!("needs mu_F > 1, got {mu_f}")));
    }
    if !mu_w.is_finite() {
        return Err(Error::Domain(format!("mu_W must be finite, got {mu_w}")));
    }
    let delta = if mu_f > 2.0 {
        mu_f - mu_w + 1.0
    } else {
        1.0 - (mu_w - mu_f) / (mu_f - 1.0)
    };
    Ok(DeltaEstimate {
        delta,
        consistent: mu_w > mu_f,
    })
}

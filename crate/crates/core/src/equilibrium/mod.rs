//! Boltzmann allocation of workers over firm productivity levels.
//!
//! Workers occupy firms with weight `e^(−βc) p^(F)(c)`, and the inverse
//! temperature `β` is fixed by the aggregate demand per worker
//! `D = ⟨c⟩_β = −d ln Z/dβ`.

mod expansion;
mod firm;
mod table;

pub use expansion::{demand_small_beta, Regime, SmallBetaExpansion};
pub use firm::{FirmDistribution, FirmKind};
pub use table::{geometric_grid, tabulate_equilibrium, EquilibriumTable};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

fn check_beta(beta: f64) -> Result<()> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "beta must be finite and >= 0, got {beta}"
        )))
    }
}

/// `Z(β) = ∫ e^(−βc) p^(F)(c) dc`, with `Z(0) = 1`.
pub fn partition_function(firm: &FirmDistribution, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta == 0.0 {
        return Ok(1.0);
    }
    if let FirmKind::Exponential { rate } = firm.kind() {
        return Ok(rate / (rate + beta));
    }
    let (v, shift) = firm.boltzmann_integral(beta, |_| 1.0)?;
    Ok(v * (-beta * shift).exp())
}

/// `⟨c^n⟩_β = (1/Z(β)) ∫ c^n p^(F)(c) e^(−βc) dc`.
pub fn moment(firm: &FirmDistribution, beta: f64, n: u32) -> Result<f64> {
    check_beta(beta)?;
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    if beta == 0.0 && nf >= firm.tail_mu() {
        return Err(Error::DivergentMoment {
            order: nf,
            tail_mu: firm.tail_mu(),
        });
    }
    match firm.kind() {
        FirmKind::Exponential { rate } => Ok((ln_gamma(nf + 1.0) - nf * (rate + beta).ln()).exp()),
        FirmKind::Gb2(p) if beta == 0.0 => p.raw_moment(nf),
        _ => {
            let (num, _) = firm.boltzmann_integral(beta, |c| c.powi(n as i32))?;
            let (den, _) = firm.boltzmann_integral(beta, |_| 1.0)?;
            Ok(num / den)
        }
    }
}

/// Aggregate demand per worker `D(β) = ⟨c⟩_β`.
pub fn mean_demand(firm: &FirmDistribution, beta: f64) -> Result<f64> {
    moment(firm, beta, 1)
}

/// `⟨c²⟩_β − ⟨c⟩_β²`, integrated about the mean to avoid cancellation.
pub fn variance(firm: &FirmDistribution, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta == 0.0 && firm.tail_mu() <= 2.0 {
        return Err(Error::DivergentMoment {
            order: 2.0,
            tail_mu: firm.tail_mu(),
        });
    }
    match firm.kind() {
        FirmKind::Exponential { rate } => Ok((rate + beta).powi(-2)),
        FirmKind::Gb2(p) if beta == 0.0 => {
            let m = p.raw_moment(1.0)?;
            Ok(p.raw_moment(2.0)? - m * m)
        }
        _ => {
            let m = mean_demand(firm, beta)?;
            let (num, _) = firm.boltzmann_integral(beta, |c| (c - m) * (c - m))?;
            let (den, _) = firm.boltzmann_integral(beta, |_| 1.0)?;
            Ok(num / den)
        }
    }
}

/// Solves `D(β) = d` for `β ≥ 0`.
///
/// Brackets in `ln β` and refines with the Illinois variant of regula falsi
/// until `D` matches to 1e-13 relative or the bracket is 1e-13 wide in
/// `ln β`.
pub fn invert_demand(firm: &FirmDistribution, d: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("demand must be positive, got {d}")));
    }
    let scale = if firm.infinite_mean() {
        firm.tail_c0()
    } else {
        let mean = mean_demand(firm, 0.0)?;
        if d >= mean {
            return Err(Error::OutOfRange(format!(
                "demand {d} is not below the unweighted mean productivity {mean}"
            )));
        }
        mean - firm.support_min()
    };
    if d <= firm.support_min() {
        return Err(Error::OutOfRange(format!(
            "demand {d} is not above the lowest productivity level {}",
            firm.support_min()
        )));
    }

    let resid = |u: f64| -> Result<f64> { Ok(mean_demand(firm, u.exp())? - d) };
    const U_MIN: f64 = -740.0;
    const U_MAX: f64 = 700.0;
    let u0 = -scale.ln();
    let f0 = resid(u0)?;
    let (mut lo, mut f_lo, mut hi, mut f_hi);
    if f0 > 0.0 {
        (lo, f_lo) = (u0, f0);
        hi = u0;
        loop {
            hi += 2.0;
            if hi > U_MAX {
                return Err(Error::Bracket(format!(
                    "no beta below e^{U_MAX} reaches demand {d}"
                )));
            }
            f_hi = resid(hi)?;
            if f_hi <= 0.0 {
                break;
            }
            (lo, f_lo) = (hi, f_hi);
        }
    } else {
        (hi, f_hi) = (u0, f0);
        lo = u0;
        loop {
            lo -= 2.0;
            if lo < U_MIN {
                // D(β) sits within rounding of d all the way down to β ≈ 0.
                return Ok(0.0);
            }
            f_lo = resid(lo)?;
            if f_lo > 0.0 {
                break;
            }
            (hi, f_hi) = (lo, f_lo);
        }
    }
    if f_hi == 0.0 {
        return Ok(hi.exp());
    }

    let mut side = 0i8;
    for _ in 0..300 {
        if hi - lo < 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mut u = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if !(u > lo && u < hi) {
            u = 0.5 * (lo + hi);
        }
        let f = resid(u)?;
        if f.abs() <= 1e-13 * d {
            return Ok(u.exp());
        }
        if f > 0.0 {
            (lo, f_lo) = (u, f);
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            (hi, f_hi) = (u, f);
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Worker density `p^(W)(c) = e^(−βc) p^(F)(c) / Z(β)`.
pub fn worker_pdf(firm: &FirmDistribution, beta: f64, c: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!(
            "worker density needs c > 0, got {c}"
        )));
    }
    match firm.kind() {
        FirmKind::Exponential { rate } => {
            let lam = rate + beta;
            Ok(lam * (-lam * c).exp())
        }
        FirmKind::Gb2(p) => {
            let z = partition_function(firm, beta)?;
            Ok((p.ln_pdf_unchecked(c) - beta * c - z.ln()).exp())
        }
        FirmKind::Empirical { .. } => Err(Error::NoDensity("an empirical firm distribution")),
    }
}

/// Occupation probabilities `p_k = e^(−βc_k) / Σ_j e^(−βc_j)` for an
/// arbitrary list of firm levels, in input order.
pub fn boltzmann_weights(levels: &[f64], beta: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let shift = levels.iter().copied().fold(f64::INFINITY, f64::min);
    if levels.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut w: Vec<f64> = levels
        .iter()
        .map(|&c| (-beta * (c - shift)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    Ok(w)
}

/// Discrete analogue of [`worker_pdf`] for an empirical firm distribution:
/// one probability per stored level, in ascending level order.
pub fn worker_probabilities(firm: &FirmDistribution, beta: f64) -> Result<Vec<f64>> {
    match firm.kind() {
        FirmKind::Empirical { levels } => boltzmann_weights(levels, beta),
        _ => Err(Error::Domain(
            "worker probabilities need an empirical firm distribution".into(),
        )),
    }
}

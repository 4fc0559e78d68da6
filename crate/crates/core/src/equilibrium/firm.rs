use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gb2::Gb2Params;
use crate::quad::{integrate_pieces, integrate_relative, Tolerance};

/// Shape of the firm productivity density `p^(F)(c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FirmKind {
    Gb2(Gb2Params),
    Exponential {
        rate: f64,
    },
    /// Equally weighted productivity levels `c_k`, sorted ascending.
    Empirical {
        levels: Vec<f64>,
    },
}

/// A firm productivity distribution together with its declared Pareto tail
/// `P>(c) ≃ (c/c0)^(−μ_F)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmDistribution {
    kind: FirmKind,
    tail_mu: f64,
    tail_c0: f64,
}

impl FirmDistribution {
    /// GB2 firms; the tail scale comes from the exact asymptotic prefactor.
    pub fn gb2(params: Gb2Params) -> Self {
        Self {
            tail_mu: params.mu(),
            tail_c0: params.tail_scale(),
            kind: FirmKind::Gb2(params),
        }
    }

    /// Exponential firms with rate `λ`. There is no power-law tail, so the
    /// tail index is infinite and `c0 = 1/λ`.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "exponential rate must be positive, got {rate}"
            )));
        }
        Ok(Self {
            kind: FirmKind::Exponential { rate },
            tail_mu: f64::INFINITY,
            tail_c0: 1.0 / rate,
        })
    }

    /// A finite set of productivity levels, one per firm. All moments are
    /// finite, so the declared tail defaults to `μ_F = ∞`; see
    /// [`with_tail`](Self::with_tail).
    pub fn empirical(levels: &[f64]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(bad) = levels.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Domain(format!(
                "productivity levels must be positive, found {bad}"
            )));
        }
        let mut levels = levels.to_vec();
        levels.sort_by(f64::total_cmp);
        let mean = levels.iter().sum::<f64>() / levels.len() as f64;
        Ok(Self {
            kind: FirmKind::Empirical { levels },
            tail_mu: f64::INFINITY,
            tail_c0: mean,
        })
    }

    /// Overrides the declared tail.
    pub fn with_tail(mut self, tail_mu: f64, tail_c0: f64) -> Result<Self> {
        if !(tail_mu > 0.0 && tail_c0 > 0.0 && tail_c0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "tail needs mu_F > 0 and c0 > 0, got ({tail_mu}, {tail_c0})"
            )));
        }
        self.tail_mu = tail_mu;
        self.tail_c0 = tail_c0;
        Ok(self)
    }

    pub fn kind(&self) -> &FirmKind {
        &self.kind
    }
    pub fn tail_mu(&self) -> f64 {
        self.tail_mu
    }
    pub fn tail_c0(&self) -> f64 {
        self.tail_c0
    }

    /// True when `μ_F ≤ 1`, i.e. `⟨c⟩₀` diverges.
    pub fn infinite_mean(&self) -> bool {
        match &self.kind {
            FirmKind::Gb2(p) => p.mu() <= 1.0,
            FirmKind::Exponential { .. } | FirmKind::Empirical { .. } => self.tail_mu <= 1.0,
        }
    }

    /// Lower edge of the support.
    pub fn support_min(&self) -> f64 {
        match &self.kind {
            FirmKind::Empirical { levels } => levels[0],
            _ => 0.0,
        }
    }

    /// Density `p^(F)(c)`; the empirical kind is discrete and has none.
    pub fn pdf(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("density needs c > 0, got {c}")));
        }
        match &self.kind {
            FirmKind::Gb2(p) => p.pdf(c),
            FirmKind::Exponential { rate } => Ok(rate * (-rate * c).exp()),
            FirmKind::Empirical { .. } => Err(Error::NoDensity("an empirical firm distribution")),
        }
    }

    /// Upper cdf `P>^(F)(c)`.
    pub fn cdf_upper(&self, c: f64) -> Result<f64> {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("cdf needs c >= 0, got {c}")));
        }
        Ok(match &self.kind {
            FirmKind::Gb2(p) => p.cdf_upper(c)?,
            FirmKind::Exponential { rate } => (-rate * c).exp(),
            FirmKind::Empirical { levels } => {
                let above = levels.len() - levels.partition_point(|&x| x <= c);
                above as f64 / levels.len() as f64
            }
        })
    }

    /// Boltzmann integral `∫ g(c) p^(F)(c) e^(−βc) dc`, returned as
    /// `(value, shift)` with the true value equal to `value · e^(−β·shift)`
    /// so that large `β` does not underflow. Requires `β > 0` for the GB2
    /// kind.
    pub(crate) fn boltzmann_integral<G: Fn(f64) -> f64>(
        &self,
        beta: f64,
        g: G,
    ) -> Result<(f64, f64)> {
        match &self.kind {
            FirmKind::Exponential { rate } => {
                let lam = rate + beta;
                let f = |t: f64| {
                    // c = t/λ, so the weight is (rate/λ) e^(−t)
                    g(t / lam) * (-t).exp()
                };
                let est =
                    integrate_relative(f, &[0.0, 1.0, 10.0, 50.0, 760.0], REL_TOL, MAX_INTERVALS)?;
                Ok((rate / lam * est.value, 0.0))
            }
            FirmKind::Empirical { levels } => {
                let shift = levels[0];
                let s: f64 = levels
                    .iter()
                    .map(|&c| g(c) * (-beta * (c - shift)).exp())
                    .sum();
                Ok((s / levels.len() as f64, shift))
            }
            FirmKind::Gb2(p) => Ok((gb2_boltzmann_integral(p, beta, g)?, 0.0)),
        }
    }
}

const REL_TOL: f64 = 1e-13;
const MAX_INTERVALS: usize = 8000;

/// `∫ g(c) p(c) e^(−βc) dc` for GB2 and `β > 0`, in the variable
/// `t = ln(c/c1)` where the density decays exponentially at both ends.
/// `g` may grow at most polynomially.
fn gb2_boltzmann_integral<G: Fn(f64) -> f64>(p: &Gb2Params, beta: f64, g: G) -> Result<f64> {
    let b = beta * p.c1();
    let ln_norm = p.ln_norm();
    // Below t_lo the density is under 1e-18 of its scale even after a
    // polynomial weight of degree two.
    let t_lo = ((-41.5 - ln_norm) / p.nu()).min(-1.0);
    // Above t_hi the Boltzmann factor is below e^(-800).
    let t_hi = (800.0 / b).ln().max(t_lo + 1.0);
    let c1 = p.c1();
    let f = |t: f64| {
        let w = (p.ln_density_log_scale(t) - b * t.exp()).exp();
        if w == 0.0 {
            0.0
        } else {
            g(c1 * t.exp()) * w
        }
    };

    let mut breaks = vec![t_lo, t_hi];
    for cand in [0.0, -b.ln(), 3.0 - b.ln()] {
        if cand > t_lo && cand < t_hi {
            breaks.push(cand);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    Ok(integrate_relative(f, &breaks, REL_TOL, MAX_INTERVALS)?.value)
}

/// `∫₀^∞ c · [P>(c) − T(c)] dc` for a GB2 firm, with the reference tail
/// `T(c) = (c/c0)^(−μ)` (or `min(1, (c/c0)^(−μ))` when `clamp` is set).
///
/// Finite when `μ + q > 2` and, without clamping, `μ < 2`.
pub(crate) fn gb2_tail_remainder(p: &Gb2Params, mu: f64, c0: f64, clamp: bool) -> Result<f64> {
    let ln_c0 = c0.ln();
    let integrand = |s: f64| {
        // s = ln c
        let c = s.exp();
        let upper = p.cdf_upper(c).unwrap_or(0.0);
        let ln_t = -mu * (s - ln_c0);
        let t = if clamp {
            ln_t.min(0.0).exp()
        } else {
            ln_t.exp()
        };
        c * c * (upper - t)
    };
    let ln_c1 = p.c1().ln();
    // Below s_lo, P> = 1 up to O(c^ν) and the integrand is c² − c·T(c),
    // integrated in closed form.
    let s_lo = ln_c1.min(ln_c0) - 20.0;
    let head = if clamp {
        0.0
    } else {
        0.5 * (2.0 * s_lo).exp() - (mu * ln_c0 + (2.0 - mu) * s_lo).exp() / (2.0 - mu)
    };
    // Beyond s_hi the relative correction (c/c1)^(−q) is below 1e-7; the rest
    // of the integral is a power law with exponent 2 − μ − q in c.
    let s_hi = ln_c1.max(ln_c0) + 7.0 * std::f64::consts::LN_10 / p.q();
    let mut breaks = vec![s_lo, ln_c1, s_hi];
    if clamp && ln_c0 > s_lo && ln_c0 < s_hi {
        breaks.push(ln_c0);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let scale = p.c1().max(c0);
    let tol = Tolerance {
        abs: 1e-14 * scale * scale,
        rel: 1e-12,
        max_intervals: MAX_INTERVALS,
    };
    let body = integrate_pieces(integrand, &breaks, tol)?.value;
    let decay = mu + p.q() - 2.0;
    let tail = integrand(s_hi) / decay;
    Ok(head + body + tail)
}

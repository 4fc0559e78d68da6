use serde::{Deserialize, Serialize};

use super::firm::{gb2_tail_remainder, FirmDistribution, FirmKind};
use super::{mean_demand, variance};
use crate::error::{Error, Result};
use crate::special::{gamma, EULER_GAMMA};

/// Tail indices closer than this to 2 use the logarithmic branch.
pub const LOG_BRANCH_WIDTH: f64 = 1e-9;

/// Small-β behavior of `D(β)`, selected by the firm tail index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `μ_F > 2`: finite variance, `D ≈ ⟨c⟩₀ − Var·β`.
    Analytic,
    /// `μ_F = 2`: `D ≈ ⟨c⟩₀ + 2c0²β ln(c0β)`.
    Logarithmic,
    /// `1 < μ_F < 2`: `D ≈ ⟨c⟩₀ − μ²Γ(−μ)c0^μ β^(μ−1)`.
    Singular,
}

impl Regime {
    pub fn for_tail(mu: f64) -> Self {
        if (mu - 2.0).abs() < LOG_BRANCH_WIDTH {
            Regime::Logarithmic
        } else if mu > 2.0 {
            Regime::Analytic
        } else {
            Regime::Singular
        }
    }
}

/// Coefficients of the small-β expansion of the mean demand.
///
/// [`leading`](Self::leading) keeps the first correction to `⟨c⟩₀` only.
/// [`demand`](Self::demand) also keeps the next order: the linear term that
/// accompanies a singular or logarithmic leading term, and the singular
/// `β^(μ−1)` term that follows the linear one when `2 < μ < 3`. The extra
/// linear coefficients need the exact shape of `P>(c)` and are available for
/// GB2 firms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBetaExpansion {
    regime: Regime,
    mean: f64,
    tail_mu: f64,
    c0: f64,
    /// `μ²Γ(−μ)c0^μ` where a `β^(μ−1)` term appears, else 0.
    singular: f64,
    /// Coefficient of `β` beyond the leading term.
    linear: Option<f64>,
}

impl SmallBetaExpansion {
    pub fn new(firm: &FirmDistribution) -> Result<Self> {
        let mu = firm.tail_mu();
        if mu <= 1.0 || firm.infinite_mean() {
            return Err(Error::DivergentMoment {
                order: 1.0,
                tail_mu: mu,
            });
        }
        let c0 = firm.tail_c0();
        let mean = mean_demand(firm, 0.0)?;
        let regime = Regime::for_tail(mu);
        let power_term = |mu: f64| mu * mu * gamma(-mu) * c0.powf(mu);
        let gb2 = match firm.kind() {
            FirmKind::Gb2(p) => Some(p),
            _ => None,
        };
        let (singular, linear) = match regime {
            Regime::Analytic => {
                let s = if mu < 3.0 { power_term(mu) } else { 0.0 };
                (s, Some(-variance(firm, 0.0)?))
            }
            Regime::Logarithmic => {
                let linear = match gb2 {
                    Some(p) if p.q() > 0.0 => {
                        let j = gb2_tail_remainder(p, 2.0, c0, true)?;
                        let c = c0 * c0 * (1.5 - EULER_GAMMA) + j;
                        Some(mean * mean + c0 * c0 - 2.0 * c)
                    }
                    _ => None,
                };
                (0.0, linear)
            }
            Regime::Singular => {
                let linear = match gb2 {
                    Some(p) if mu + p.q() > 2.0 => {
                        let j = gb2_tail_remainder(p, mu, c0, false)?;
                        Some(mean * mean - 2.0 * j)
                    }
                    _ => None,
                };
                (power_term(mu), linear)
            }
        };
        Ok(Self {
            regime,
            mean,
            tail_mu: mu,
            c0,
            singular,
            linear,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn mean(&self) -> f64 {
        self.mean
    }
    /// Whether [`demand`](Self::demand) carries terms beyond the leading one.
    pub fn has_next_order(&self) -> bool {
        match self.regime {
            Regime::Analytic => self.singular != 0.0,
            _ => self.linear.is_some(),
        }
    }

    /// Leading-order expansion.
    pub fn leading(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return self.mean;
        }
        match self.regime {
            Regime::Analytic => self.mean + self.linear.unwrap_or(0.0) * beta,
            Regime::Logarithmic => {
                self.mean + 2.0 * self.c0 * self.c0 * beta * (self.c0 * beta).ln()
            }
            Regime::Singular => self.mean - self.singular * beta.powf(self.tail_mu - 1.0),
        }
    }

    /// Expansion including the next-order term where it is known.
    pub fn demand(&self, beta: f64) -> f64 {
        if beta == 0.0 {
            return self.mean;
        }
        match self.regime {
            Regime::Analytic => self.leading(beta) - self.singular * beta.powf(self.tail_mu - 1.0),
            _ => self.leading(beta) + self.linear.unwrap_or(0.0) * beta,
        }
    }
}

/// Small-β approximation of `D(β)`; see [`SmallBetaExpansion::demand`].
pub fn demand_small_beta(firm: &FirmDistribution, beta: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    Ok(SmallBetaExpansion::new(firm)?.demand(beta))
}

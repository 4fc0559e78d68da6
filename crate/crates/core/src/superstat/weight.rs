use serde::{Deserialize, Serialize};

use crate::equilibrium::{invert_demand, mean_demand, FirmDistribution};
use crate::error::{Error, Result};
use crate::quad::integrate_relative;

/// Distribution `f_β(β)` of the fluctuating inverse temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BetaWeight {
    PointMass {
        beta0: f64,
    },
    /// `f_β ∝ β^(−γ)` on `(0, β_max]`, normalized.
    PowerLaw {
        gamma: f64,
        beta_max: f64,
    },
    /// Equally weighted sample of temperatures.
    Empirical {
        betas: Vec<f64>,
    },
}

/// Fraction of `⟨c⟩₀` at which the default power-law cutoff sits.
pub const DEFAULT_CUTOFF_DEMAND: f64 = 0.01;

impl BetaWeight {
    pub fn point_mass(beta0: f64) -> Result<Self> {
        if !(beta0 > 0.0 && beta0.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta0 must be positive, got {beta0}"
            )));
        }
        Ok(Self::PointMass { beta0 })
    }

    pub fn power_law(gamma: f64, beta_max: f64) -> Result<Self> {
        if !(gamma < 1.0 && gamma.is_finite()) {
            return Err(Error::Normalizability(format!(
                "power-law weight needs gamma < 1, got {gamma}"
            )));
        }
        if !(beta_max > 0.0 && beta_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta_max must be positive, got {beta_max}"
            )));
        }
        Ok(Self::PowerLaw { gamma, beta_max })
    }

    /// Power law cut off at the `β` where `D(β) = 0.01·⟨c⟩₀`.
    pub fn power_law_for(firm: &FirmDistribution, gamma: f64) -> Result<Self> {
        let mean = mean_demand(firm, 0.0)?;
        let beta_max = invert_demand(firm, DEFAULT_CUTOFF_DEMAND * mean)?;
        Self::power_law(gamma, beta_max)
    }

    pub fn empirical(betas: &[f64]) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::Domain(format!(
                "temperatures must be positive, found {b}"
            )));
        }
        Ok(Self::Empirical {
            betas: betas.to_vec(),
        })
    }

    /// Prefactor `A` of the power-law density `A·β^(−γ)`:
    /// `(1 − γ)·β_max^(γ − 1)`. `None` for other kinds.
    pub fn normalization(&self) -> Option<f64> {
        match self {
            Self::PowerLaw { gamma, beta_max } => Some((1.0 - gamma) * beta_max.powf(gamma - 1.0)),
            _ => None,
        }
    }
}

/// Generalized Boltzmann factor `B(c) = ∫ e^(−βc) f_β(β) dβ`.
pub fn generalized_boltzmann(weight: &BetaWeight, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!(
            "Boltzmann factor needs c > 0, got {c}"
        )));
    }
    match weight {
        BetaWeight::PointMass { beta0 } => Ok((-beta0 * c).exp()),
        BetaWeight::Empirical { betas } => {
            Ok(betas.iter().map(|b| (-b * c).exp()).sum::<f64>() / betas.len() as f64)
        }
        BetaWeight::PowerLaw { gamma, beta_max } => {
            // With u = (β/β_max)^(1−γ) the normalized weight becomes du on
            // (0, 1], leaving ∫₀¹ exp(−x·u^(1/(1−γ))) du with x = c·β_max.
            let x = c * beta_max;
            let p = 1.0 / (1.0 - gamma);
            let f = |u: f64| (-x * u.powf(p)).exp();
            // Break where the exponent x·u^(1/(1−γ)) passes fixed levels, so
            // no piece starts beyond the decay unseen.
            let mut breaks = vec![0.0];
            for k in [0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 800.0] {
                let b = (k / x).powf(1.0 - gamma);
                if b < 1.0 {
                    breaks.push(b);
                }
            }
            breaks.push(1.0);
            Ok(integrate_relative(f, &breaks, 1e-13, 4000)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gb2::Gb2Params;
    use crate::special::{gamma as gamma_fn, gamma_lr};
    use approx::assert_relative_eq;

    /// `(1−γ) x^(γ−1) Γ(1−γ) P(1−γ, x)` via the regularized incomplete gamma.
    fn oracle(gamma: f64, beta_max: f64, c: f64) -> f64 {
        let x = c * beta_max;
        let a = 1.0 - gamma;
        a * x.powf(-a) * gamma_fn(a) * gamma_lr(a, x)
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(
            BetaWeight::power_law(1.0, 1.0),
            Err(Error::Normalizability(_))
        ));
        assert!(BetaWeight::power_law(0.5, 0.0).is_err());
        assert!(BetaWeight::point_mass(-1.0).is_err());
        assert!(BetaWeight::empirical(&[]).is_err());
        assert!(BetaWeight::empirical(&[1.0, 0.0]).is_err());
        assert!(generalized_boltzmann(&BetaWeight::point_mass(1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn point_mass_and_empirical() {
        let w = BetaWeight::point_mass(2.0).unwrap();
        assert_relative_eq!(
            generalized_boltzmann(&w, 1.0).unwrap(),
            (-2.0f64).exp(),
            max_relative = 1e-15
        );
        let w = BetaWeight::empirical(&[1.0, 3.0]).unwrap();
        let b = generalized_boltzmann(&w, 0.5).unwrap();
        assert_relative_eq!(
            b,
            0.5 * ((-0.5f64).exp() + (-1.5f64).exp()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn uniform_weight_closed_form() {
        let w = BetaWeight::power_law(0.0, 1.0).unwrap();
        let b = generalized_boltzmann(&w, 10.0).unwrap();
        assert_relative_eq!(b, (1.0 - (-10.0f64).exp()) / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn matches_incomplete_gamma() {
        for gamma in [-1.5, 0.0, 0.25, 0.5, 0.75, 0.95] {
            for c in [1e-3, 0.3, 1.0, 17.0, 1e3, 1e6] {
                let w = BetaWeight::power_law(gamma, 2.0).unwrap();
                let b = generalized_boltzmann(&w, c).unwrap();
                assert_relative_eq!(b, oracle(gamma, 2.0, c), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn large_c_power_law() {
        let w = BetaWeight::power_law(0.5, 1.0).unwrap();
        let c: f64 = 1e4;
        let r = c.powf(0.5) * generalized_boltzmann(&w, c).unwrap() / w.normalization().unwrap();
        assert!((r / std::f64::consts::PI.sqrt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn log_slope_tends_to_gamma_minus_one() {
        for gamma in [-0.5, 0.0, 0.3, 0.8] {
            let bm = 0.37;
            let w = BetaWeight::power_law(gamma, bm).unwrap();
            let c = 1e4 / bm;
            let h = 1e-3;
            let slope = (generalized_boltzmann(&w, c * (1.0 + h)).unwrap().ln()
                - generalized_boltzmann(&w, c * (1.0 - h)).unwrap().ln())
                / ((1.0 + h).ln() - (1.0 - h).ln());
            assert!(
                (slope / (gamma - 1.0) - 1.0).abs() < 0.02,
                "gamma {gamma}: {slope}"
            );
        }
    }

    #[test]
    fn default_cutoff() {
        let f = FirmDistribution::gb2(Gb2Params::new(1.8, 1.0, 1.0, 1.0).unwrap());
        let w = BetaWeight::power_law_for(&f, 0.6).unwrap();
        let BetaWeight::PowerLaw { beta_max, .. } = w else {
            unreachable!()
        };
        let ratio = mean_demand(&f, beta_max).unwrap() / mean_demand(&f, 0.0).unwrap();
        assert_relative_eq!(ratio, 0.01, max_relative = 1e-9);
    }
}

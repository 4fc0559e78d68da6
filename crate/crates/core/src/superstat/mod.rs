//! Superstatistics: the Boltzmann factor averaged over a fluctuating
//! temperature, the demand fluctuation law, and the resulting relations
//! between Pareto indices at successive aggregation levels.

mod demand;
mod transfer;
mod weight;

pub use demand::{sample_demand, DemandLaw};
pub use transfer::{gamma_from_delta, infer_delta, predict_mu_f, predict_mu_w, DeltaEstimate};
pub use weight::{generalized_boltzmann, BetaWeight, DEFAULT_CUTOFF_DEMAND};

use crate::equilibrium::{partition_function, FirmDistribution, FirmKind};
use crate::error::{Error, Result};
use crate::quad::integrate_relative;

/// Superstatistical worker density `p^(F)(c) B(c) / Z_B` with `Z_B` computed
/// once.
#[derive(Debug, Clone)]
pub struct SuperWorkerDensity {
    firm: FirmDistribution,
    weight: BetaWeight,
    z_b: f64,
    range: (f64, f64),
}

/// Integration range in `s = ln c` outside which `c·p^(F)(c)` is negligible.
fn log_support(firm: &FirmDistribution) -> Result<(f64, f64)> {
    match firm.kind() {
        FirmKind::Gb2(p) => {
            let ln_c1 = p.c1().ln();
            let n = p.ln_norm();
            Ok((
                ln_c1 + ((-41.5 - n) / p.nu()).min(-1.0),
                ln_c1 + ((41.5 + n) / p.mu()).max(1.0),
            ))
        }
        FirmKind::Exponential { rate } => Ok((-41.5 - rate.ln(), (800.0 / rate).ln())),
        FirmKind::Empirical { .. } => Err(Error::NoDensity("an empirical firm distribution")),
    }
}

impl SuperWorkerDensity {
    pub fn new(firm: &FirmDistribution, weight: &BetaWeight) -> Result<Self> {
        let range = log_support(firm)?;
        let z_b = match weight {
            BetaWeight::PointMass { beta0 } => partition_function(firm, *beta0)?,
            BetaWeight::Empirical { betas } => {
                let mut s = 0.0;
                for &b in betas {
                    s += partition_function(firm, b)?;
                }
                s / betas.len() as f64
            }
            BetaWeight::PowerLaw { .. } => {
                let f = |s: f64| integrand(firm, weight, s);
                integrate_relative(f, &breaks(firm, range, range.0), 1e-12, 8000)?.value
            }
        };
        Ok(Self {
            firm: firm.clone(),
            weight: weight.clone(),
            z_b,
            range,
        })
    }

    pub fn z_b(&self) -> f64 {
        self.z_b
    }

    pub fn pdf(&self, c: f64) -> Result<f64> {
        Ok(self.firm.pdf(c)? * generalized_boltzmann(&self.weight, c)? / self.z_b)
    }

    /// Worker upper cdf `P>^(W)(c)`.
    pub fn cdf_upper(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("cdf needs c > 0, got {c}")));
        }
        let s0 = c.ln();
        if s0 >= self.range.1 {
            return Ok(0.0);
        }
        let f = |s: f64| integrand(&self.firm, &self.weight, s);
        let lo = s0.max(self.range.0);
        let v =
            integrate_relative(f, &breaks(&self.firm, (lo, self.range.1), lo), 1e-12, 8000)?.value;
        Ok((v / self.z_b).min(1.0))
    }
}

fn integrand(firm: &FirmDistribution, weight: &BetaWeight, s: f64) -> f64 {
    let c = s.exp();
    match (firm.pdf(c), generalized_boltzmann(weight, c)) {
        (Ok(p), Ok(b)) => c * p * b,
        _ => 0.0,
    }
}

fn breaks(firm: &FirmDistribution, (lo, hi): (f64, f64), from: f64) -> Vec<f64> {
    let mut v = vec![lo, hi];
    let mid = match firm.kind() {
        FirmKind::Gb2(p) => p.c1().ln(),
        _ => firm.tail_c0().ln(),
    };
    for x in [mid, mid + 5.0, mid + 15.0] {
        if x > from.max(lo) && x < hi {
            v.push(x);
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

/// One-shot `p^(W)(c)`; build a [`SuperWorkerDensity`] to evaluate many points.
pub fn worker_pdf_super(firm: &FirmDistribution, weight: &BetaWeight, c: f64) -> Result<f64> {
    SuperWorkerDensity::new(firm, weight)?.pdf(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::worker_pdf;
    use crate::gb2::Gb2Params;
    use crate::quad::{integrate, Tolerance};
    use approx::assert_relative_eq;

    fn firm(mu: f64) -> FirmDistribution {
        FirmDistribution::gb2(Gb2Params::new(mu, 1.0, 1.0, 1.0).unwrap())
    }

    #[test]
    fn point_mass_reduces_to_boltzmann() {
        let f = firm(2.3);
        let w = BetaWeight::point_mass(0.4).unwrap();
        let d = SuperWorkerDensity::new(&f, &w).unwrap();
        for c in [1e-3, 0.1, 1.0, 7.0, 50.0] {
            assert_relative_eq!(
                d.pdf(c).unwrap(),
                worker_pdf(&f, 0.4, c).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn normalized_for_each_weight() {
        let f = firm(1.8);
        let e = FirmDistribution::exponential(0.5).unwrap();
        let tol = Tolerance {
            abs: 1e-14,
            rel: 1e-10,
            max_intervals: 8000,
        };
        for w in [
            BetaWeight::point_mass(0.05).unwrap(),
            BetaWeight::power_law(0.6, 3.0).unwrap(),
            BetaWeight::power_law(-1.0, 0.2).unwrap(),
            BetaWeight::empirical(&[0.01, 0.3, 2.0]).unwrap(),
        ] {
            for fd in [&f, &e] {
                let d = SuperWorkerDensity::new(fd, &w).unwrap();
                // Independent grid: plain quadrature in ln c over a wide window.
                let total = integrate(|s| s.exp() * d.pdf(s.exp()).unwrap(), -60.0, 60.0, tol)
                    .unwrap()
                    .value;
                assert!((total - 1.0).abs() < 1e-7, "{w:?}: {total}");
                assert_relative_eq!(d.cdf_upper(1e-30).unwrap(), 1.0, max_relative = 1e-9);
            }
        }
        assert!(SuperWorkerDensity::new(
            &FirmDistribution::empirical(&[1.0]).unwrap(),
            &BetaWeight::point_mass(1.0).unwrap()
        )
        .is_err());
    }

    #[test]
    fn worker_tail_index_shift() {
        let f = firm(1.8);
        let w = BetaWeight::power_law_for(&f, 0.6).unwrap();
        let d = SuperWorkerDensity::new(&f, &w).unwrap();
        let (a, b) = (1e2, 1e4);
        let slope = (d.cdf_upper(b).unwrap().ln() - d.cdf_upper(a).unwrap().ln()) / (b / a).ln();
        assert!((-slope / 2.2 - 1.0).abs() < 0.05, "slope = {slope}");
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregate-demand fluctuation law `f_D(D) ∝ (c̄ − D)^(−δ)` on
/// `(d_min, c̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandLaw {
    delta: f64,
    c_mean: f64,
    d_min: f64,
}

impl DemandLaw {
    pub fn new(delta: f64, c_mean: f64) -> Result<Self> {
        Self::with_min(delta, c_mean, 0.0)
    }

    pub fn with_min(delta: f64, c_mean: f64, d_min: f64) -> Result<Self> {
        if !(delta < 1.0) {
            return Err(Error::Normalizability(format!(
                "demand law needs delta < 1, got {delta}"
            )));
        }
        if !(c_mean > 0.0 && c_mean.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "mean productivity must be positive, got {c_mean}"
            )));
        }
        if !(d_min >= 0.0 && d_min < c_mean) {
            return Err(Error::InvalidParams(format!(
                "lower demand bound must lie in [0, {c_mean}), got {d_min}"
            )));
        }
        Ok(Self {
            delta,
            c_mean,
            d_min,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn c_mean(&self) -> f64 {
        self.c_mean
    }
    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    /// Normalized density on the support, zero outside.
    pub fn pdf(&self, d: f64) -> f64 {
        if !(d > self.d_min && d < self.c_mean) {
            return 0.0;
        }
        let w = self.c_mean - self.d_min;
        let a = 1.0 - self.delta;
        a * (self.c_mean - d).powf(-self.delta) / w.powf(a)
    }

    /// One inverse-transform draw, strictly inside `(d_min, c̄)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let w = self.c_mean - self.d_min;
        let inv = 1.0 / (1.0 - self.delta);
        loop {
            // Uniform on the open interval (0, 1).
            let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            let d = self.c_mean - w * u.powf(inv);
            if d > self.d_min && d < self.c_mean {
                return d;
            }
        }
    }
}

/// `n` draws from the demand law with a ChaCha8 stream seeded by `seed`.
pub fn sample_demand(law: &DemandLaw, seed: u64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| law.draw(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_laws() {
        assert!(matches!(
            DemandLaw::new(1.0, 1.0),
            Err(Error::Normalizability(_))
        ));
        assert!(DemandLaw::new(0.5, 0.0).is_err());
        assert!(DemandLaw::with_min(0.5, 1.0, 1.0).is_err());
        assert!(sample_demand(&DemandLaw::new(0.5, 1.0).unwrap(), 1, 0).is_err());
    }

    #[test]
    fn flat_law_is_uniform() {
        let law = DemandLaw::with_min(0.0, 3.0, 1.0).unwrap();
        let n = 1_000_000;
        let s = sample_demand(&law, 7, n).unwrap();
        let mean = s.iter().sum::<f64>() / n as f64;
        // sd of the mean is (2/√12)/√n
        assert!((mean - 2.0).abs() < 3.0 * 2.0 / 12f64.sqrt() / (n as f64).sqrt());
        assert!(s.iter().all(|&d| d > 1.0 && d < 3.0));
    }

    #[test]
    fn strictly_inside_support_near_one() {
        let law = DemandLaw::new(0.99, 1.0).unwrap();
        let s = sample_demand(&law, 3, 100_000).unwrap();
        assert!(s.iter().all(|&d| d > 0.0 && d < 1.0));
    }

    #[test]
    fn gap_density_slope() {
        let law = DemandLaw::new(0.5, 1.0).unwrap();
        let s = sample_demand(&law, 11, 1_000_000).unwrap();
        // Density of x = 1 − D is ∝ x^(−0.5); count per log bin / bin width.
        let edges: Vec<f64> = (0..=12)
            .map(|i| 10f64.powf(-4.0 + 0.25 * i as f64))
            .collect();
        let mut counts = [0usize; 12];
        for &d in &s {
            let x = 1.0 - d;
            if x >= edges[0] && x < edges[12] {
                let i = ((x.log10() + 4.0) / 0.25) as usize;
                counts[i.min(11)] += 1;
            }
        }
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let (a, b) = (edges[i], edges[i + 1]);
                (((a * b).sqrt()).ln(), (counts[i] as f64 / (b - a)).ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 0.5).abs() < 0.03 * 0.5, "slope = {slope}");
    }

    #[test]
    fn pdf_normalizes() {
        let law = DemandLaw::with_min(-0.7, 2.0, 0.5).unwrap();
        let e = crate::quad::integrate(|d| law.pdf(d), 0.5, 2.0, Default::default()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
    }
}

//! Generalized Beta distribution of the second kind (GB2).
//!
//! Upper cdf
//!
//! ```text
//! P>(c) = I_z(μ/q, ν/q),   z = 1 / (1 + (c/c1)^q)
//! ```
//!
//! and density
//!
//! ```text
//! p(c) = q / B(μ/q, ν/q) · (1/c) · (c/c1)^ν · [1 + (c/c1)^q]^(−(μ+ν)/q)
//! ```
//!
//! The upper tail is Pareto with index μ, the lower tail a power law with
//! exponent ν.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{beta_reg, inv_beta_reg, ln_beta, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gb2Params {
    mu: f64,
    nu: f64,
    q: f64,
    c1: f64,
}

/// Log-normal approximation around the peak of `c·p(c)`.
///
/// `c_ln` is expressed in units of `c1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalApprox {
    pub c_ln: f64,
    pub sigma: f64,
}

impl Gb2Params {
    pub fn new(mu: f64, nu: f64, q: f64, c1: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("nu", nu), ("q", q), ("c1", c1)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "GB2 parameter {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { mu, nu, q, c1 })
    }

    /// Pareto index of the upper tail.
    pub fn mu(&self) -> f64 {
        self.mu
    }
    /// Power exponent of the lower tail.
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }

    fn shape_a(&self) -> f64 {
        self.mu / self.q
    }
    fn shape_b(&self) -> f64 {
        self.nu / self.q
    }

    /// `ln(q / B(μ/q, ν/q))`.
    pub fn ln_norm(&self) -> f64 {
        self.q.ln() - ln_beta(self.shape_a(), self.shape_b())
    }

    /// `ln(c · p(c))` as a function of `t = ln(c/c1)`; the log-variable density.
    pub fn ln_density_log_scale(&self, t: f64) -> f64 {
        self.ln_norm() + self.nu * t - (self.mu + self.nu) / self.q * softplus(self.q * t)
    }

    /// Log density; caller guarantees `c > 0`.
    pub fn ln_pdf_unchecked(&self, c: f64) -> f64 {
        self.ln_density_log_scale((c / self.c1).ln()) - c.ln()
    }

    pub fn ln_pdf(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("GB2 density needs c > 0, got {c}")));
        }
        Ok(self.ln_pdf_unchecked(c))
    }

    pub fn pdf(&self, c: f64) -> Result<f64> {
        self.ln_pdf(c).map(f64::exp)
    }

    /// `z = 1/(1+r)` and `1 − z = r/(1+r)` with `r = (c/c1)^q`, both to full
    /// relative precision.
    fn z_pair(&self, c: f64) -> (f64, f64) {
        let s = self.q * (c / self.c1).ln();
        let sp = softplus(s);
        ((-sp).exp(), (s - sp).exp())
    }

    /// Upper cumulative distribution `P>(c)`; equals 1 at `c = 0`.
    pub fn cdf_upper(&self, c: f64) -> Result<f64> {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("GB2 cdf needs c >= 0, got {c}")));
        }
        if c == 0.0 {
            return Ok(1.0);
        }
        if c.is_infinite() {
            return Ok(0.0);
        }
        let (z, w) = self.z_pair(c);
        let (a, b) = (self.shape_a(), self.shape_b());
        Ok(if z <= 0.5 {
            beta_reg(a, b, z)
        } else {
            1.0 - beta_reg(b, a, w)
        })
    }

    /// Lower cumulative distribution `1 − P>(c)`, accurate for small `c`.
    pub fn cdf_lower(&self, c: f64) -> Result<f64> {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("GB2 cdf needs c >= 0, got {c}")));
        }
        if c == 0.0 {
            return Ok(0.0);
        }
        if c.is_infinite() {
            return Ok(1.0);
        }
        let (z, w) = self.z_pair(c);
        let (a, b) = (self.shape_a(), self.shape_b());
        Ok(if w <= 0.5 {
            beta_reg(b, a, w)
        } else {
            1.0 - beta_reg(a, b, z)
        })
    }

    /// Asymptotic power-law upper cdf `(q/μ)/B(μ/q,ν/q) · (c/c1)^(−μ)`.
    pub fn tail_upper(&self, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("GB2 tail needs c > 0, got {c}")));
        }
        Ok((self.ln_norm() - self.mu.ln() - self.mu * (c / self.c1).ln()).exp())
    }

    /// Scale `c0` of the pure power law `(c/c0)^(−μ)` that the upper cdf
    /// approaches: `c0 = c1 · [(q/μ)/B(μ/q,ν/q)]^(1/μ)`.
    pub fn tail_scale(&self) -> f64 {
        self.c1 * ((self.ln_norm() - self.mu.ln()) / self.mu).exp()
    }

    pub fn lognormal_peak(&self) -> LogNormalApprox {
        LogNormalApprox {
            c_ln: (self.nu / self.mu).powf(1.0 / self.q),
            sigma: (self.nu + self.mu) / (self.nu * self.mu) / self.q,
        }
    }

    /// Raw moment `E[c^n] = c1^n B(ν/q + n/q, μ/q − n/q) / B(ν/q, μ/q)`,
    /// finite for `−ν < n < μ`.
    pub fn raw_moment(&self, n: f64) -> Result<f64> {
        if n >= self.mu || n <= -self.nu {
            return Err(Error::DivergentMoment {
                order: n,
                tail_mu: self.mu,
            });
        }
        let (a, b) = (self.shape_a(), self.shape_b());
        let r = n / self.q;
        Ok(self.c1.powf(n) * (ln_beta(b + r, a - r) - ln_beta(b, a)).exp())
    }

    /// One draw via `c1 · (X/Y)^(1/q)` with `X ~ Γ(ν/q)`, `Y ~ Γ(μ/q)`.
    ///
    /// `X/(X+Y)` is Beta(ν/q, μ/q), so this is the Beta-ratio transform
    /// `c1 · (V/(1−V))^(1/q)` without forming `1 − V`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let gx = Gamma::new(self.shape_b(), 1.0).expect("validated shape");
        let gy = Gamma::new(self.shape_a(), 1.0).expect("validated shape");
        loop {
            let x: f64 = gx.sample(rng);
            let y: f64 = gy.sample(rng);
            let c = self.c1 * ((x.ln() - y.ln()) / self.q).exp();
            if c.is_finite() && c > 0.0 {
                return c;
            }
        }
    }

    /// Productivity above which a fraction `s` of the mass lies: the inverse
    /// of [`cdf_upper`](Self::cdf_upper) on `(0, 1)`.
    pub fn quantile_upper(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!(
                "upper quantile needs 0 < s < 1, got {s}"
            )));
        }
        let (a, b) = (self.shape_a(), self.shape_b());
        // P> = I_z(a, b) with z = 1/(1+r); P< = I_w(b, a) with w = r/(1+r).
        let ln_r = if s <= 0.5 {
            let z = inv_beta_reg(a, b, s);
            (-z).ln_1p() - z.ln()
        } else {
            let w = inv_beta_reg(b, a, 1.0 - s);
            w.ln() - (-w).ln_1p()
        };
        Ok(self.c1 * (ln_r / self.q).exp())
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let gx = Gamma::new(self.shape_b(), 1.0).expect("validated shape");
        let gy = Gamma::new(self.shape_a(), 1.0).expect("validated shape");
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let x: f64 = gx.sample(rng);
            let y: f64 = gy.sample(rng);
            let c = self.c1 * ((x.ln() - y.ln()) / self.q).exp();
            if c.is_finite() && c > 0.0 {
                out.push(c);
            }
        }
        out
    }
}

pub fn gb2_pdf(params: &Gb2Params, c: f64) -> Result<f64> {
    params.pdf(c)
}

pub fn gb2_cdf_upper(params: &Gb2Params, c: f64) -> Result<f64> {
    params.cdf_upper(c)
}

pub fn gb2_tail_upper(params: &Gb2Params, c: f64) -> Result<f64> {
    params.tail_upper(c)
}

pub fn gb2_lognormal_peak(params: &Gb2Params) -> LogNormalApprox {
    params.lognormal_peak()
}

/// `n` i.i.d. GB2 draws, deterministic in `seed`.
pub fn gb2_sample(params: &Gb2Params, seed: u64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(params.sample_with(&mut rng, n))
}

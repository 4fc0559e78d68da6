//! Special functions used throughout the crate.
//!
//! Gamma-family functions come from `statrs`; the regularized incomplete beta
//! is evaluated here with a modified-Lentz continued fraction plus a power
//! series for the region where the series converges faster.

use statrs::function::gamma as sgamma;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const BETA_TOL: f64 = 1e-15;
const BETA_MAX_ITER: usize = 10_000;

pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

/// Gamma function on the whole real line except the non-positive integers.
///
/// Negative arguments go through the reflection formula
/// `Γ(x) Γ(1 − x) = π / sin(πx)`.
pub fn gamma(x: f64) -> f64 {
    if x >= 0.5 {
        sgamma::gamma(x)
    } else {
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI / (s * gamma(1.0 - x))
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_lr(a: f64, x: f64) -> f64 {
    sgamma::gamma_lr(a, x)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) so that the continued
    // fraction is evaluated where it converges quickly.
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - beta_reg(b, a, 1.0 - x);
    }
    let ln_xa = a * x.ln() - ln_beta(a, b) - a.ln();
    if x < 0.1 * (a + 1.0) / (a + b + 2.0) {
        if let Some(s) = beta_series(a, b, x) {
            return ln_xa.exp() * s;
        }
    }
    (ln_xa + b * (-x).ln_1p()).exp() * beta_cf(a, b, x)
}

/// Upper tail `1 − I_x(a, b) = I_{1−x}(b, a)` evaluated without cancellation.
pub fn beta_reg_upper(a: f64, b: f64, x: f64) -> f64 {
    beta_reg(b, a, 1.0 - x)
}

/// Power series `Σ (1−b)_n x^n / (n! (a+n))`, multiplied by `a` so the
/// leading term is 1.
fn beta_series(a: f64, b: f64, x: f64) -> Option<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..BETA_MAX_ITER {
        let nf = n as f64;
        term *= (nf - b) * x / nf;
        let contrib = term * a / (a + nf);
        sum += contrib;
        if contrib.abs() < BETA_TOL * sum.abs() {
            return Some(sum);
        }
    }
    None
}

/// Continued fraction for `I_x(a,b) · a B(a,b) / (x^a (1-x)^b)`.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..BETA_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_TOL {
            break;
        }
    }
    h
}

/// Inverse of the regularized incomplete beta in `x`: solves `I_x(a, b) = p`.
///
/// For `p ≤ 1/2` this runs Newton on `ln I` against `ln x`, which is nearly
/// linear where `I ∝ x^a`, starting from the statrs inversion. Larger `p`
/// goes through `I_x(a, b) = 1 − I_(1−x)(b, a)`.
pub fn inv_beta_reg(a: f64, b: f64, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    if p > 0.5 {
        return 1.0 - inv_beta_reg(b, a, 1.0 - p);
    }
    let lnb = ln_beta(a, b);
    let ln_p = p.ln();
    let start = statrs::function::beta::inv_beta_reg(a, b, p);
    // Leading behavior I ≈ x^a / (a B) as a fallback start.
    let mut y = if start > 0.0 && start < 1.0 {
        start.ln()
    } else {
        ((ln_p + a.ln() + lnb) / a).min(-f64::EPSILON)
    };
    for _ in 0..60 {
        let x = y.exp();
        let i = beta_reg(a, b, x);
        if !(i > 0.0) {
            y += 1.0;
            continue;
        }
        let dens = (a * y + b * (-x).ln_1p() - (-x).ln_1p() - lnb).exp();
        let slope = dens / i;
        let step = ((i.ln() - ln_p) / slope).clamp(-5.0, 5.0);
        let mut next = y - step;
        if next >= 0.0 {
            next = 0.5 * y;
        }
        let done = (next - y).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0);
        y = next;
        if done {
            break;
        }
    }
    y.exp()
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

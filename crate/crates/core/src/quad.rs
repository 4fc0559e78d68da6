//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Semi-infinite integrals elsewhere in the crate are mapped onto finite
//! intervals of the log variable `t = ln c` before reaching this module.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let error = ((kron - gauss) * half).abs();
    Segment {
        lo,
        hi,
        value: kron * half,
        error,
    }
}

/// Integrates `f` over `[lo, hi]`, bisecting the worst segment until the
/// summed error estimate is within `max(abs, rel·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Estimate> {
    if lo == hi {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let first = kronrod(&f, lo, hi);
    let mut evals = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while error > tol.abs.max(tol.rel * value.abs()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                lo,
                hi,
                estimate: value,
                error,
                evals,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Segment cannot be split further in floating point.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            error -= worst.error;
            continue;
        }
        let left = kronrod(&f, worst.lo, mid);
        let right = kronrod(&f, mid, worst.hi);
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate {
        value,
        error,
        evals,
    })
}

/// Integrates over consecutive breakpoints, summing the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    for w in breaks.windows(2) {
        let e = integrate(&f, w[0], w[1], tol)?;
        total.value += e.value;
        total.error += e.error;
        total.evals += e.evals;
    }
    Ok(total)
}

/// Integrates over breakpoints to relative accuracy `rel` of the total.
///
/// A coarse pass fixes the scale, so pieces that contribute negligibly are
/// not refined toward a relative target they cannot reach.
pub fn integrate_relative<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel: f64,
    max_intervals: usize,
) -> Result<Estimate> {
    let coarse = integrate_pieces(
        &f,
        breaks,
        Tolerance {
            abs: 1e-290,
            rel: 1e-5,
            max_intervals,
        },
    )?;
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    let tol = Tolerance {
        abs: (rel * coarse.value.abs() / pieces).max(1e-300),
        rel,
        max_intervals,
    };
    integrate_pieces(&f, breaks, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, 64.0 / 6.0 - 1.0 / 6.0 - 9.0, max_relative = 1e-14);
        assert_eq!(e.evals, 15);
    }

    #[test]
    fn peaked_and_oscillatory() {
        let e = integrate(|x| (-x * x * 1e4).exp(), -1.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(
            e.value,
            std::f64::consts::PI.sqrt() / 100.0,
            max_relative = 1e-12
        );
        let e = integrate(
            |x| (50.0 * x).sin(),
            0.0,
            std::f64::consts::PI,
            Tolerance::default(),
        )
        .unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn relative_mode_ignores_negligible_pieces() {
        let f = |x: f64| (-x).exp();
        let e = integrate_relative(f, &[0.0, 1.0, 700.0, 745.0], 1e-13, 4000).unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let e = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn reports_failure() {
        let tol = Tolerance {
            max_intervals: 3,
            ..Tolerance::default()
        };
        let err = integrate(|x| 1.0 / x, 1e-300, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }
}

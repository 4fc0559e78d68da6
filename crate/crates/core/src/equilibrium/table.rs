use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{invert_demand, mean_demand, partition_function, variance, FirmDistribution};
use crate::error::{Error, Result};

/// `(β, Z, D)` on a fixed β grid, with cubic Hermite interpolation in
/// `u = ln β` using the exact slope `dD/du = −β·Var_β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumTable {
    betas: Vec<f64>,
    z: Vec<f64>,
    d: Vec<f64>,
    slope: Vec<f64>,
}

/// `n ≥ 2` log-spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn tabulate_equilibrium(
    firm: &FirmDistribution,
    beta_grid: &[f64],
) -> Result<EquilibriumTable> {
    if beta_grid.is_empty() {
        return Err(Error::EmptySample);
    }
    if beta_grid[0] <= 0.0
        || !beta_grid.windows(2).all(|w| w[1] > w[0])
        || !beta_grid.iter().all(|b| b.is_finite())
    {
        return Err(Error::Domain(
            "beta grid must be positive, finite and strictly increasing".into(),
        ));
    }
    let rows: Vec<(f64, f64, f64)> = beta_grid
        .par_iter()
        .map(|&b| {
            Ok((
                partition_function(firm, b)?,
                mean_demand(firm, b)?,
                -b * variance(firm, b)?,
            ))
        })
        .collect::<Result<_>>()?;
    let (mut z, mut d, mut slope) = (Vec::new(), Vec::new(), Vec::new());
    for (zi, di, si) in rows {
        z.push(zi);
        d.push(di);
        slope.push(si);
    }
    Ok(EquilibriumTable {
        betas: beta_grid.to_vec(),
        z,
        d,
        slope,
    })
}

impl EquilibriumTable {
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
    pub fn z(&self) -> &[f64] {
        &self.z
    }
    pub fn d(&self) -> &[f64] {
        &self.d
    }
    pub fn len(&self) -> usize {
        self.betas.len()
    }
    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    fn hermite(&self, i: usize, u: f64) -> f64 {
        let (u0, u1) = (self.betas[i].ln(), self.betas[i + 1].ln());
        let h = u1 - u0;
        let s = (u - u0) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.d[i]
            + (s3 - 2.0 * s2 + s) * h * self.slope[i]
            + (-2.0 * s3 + 3.0 * s2) * self.d[i + 1]
            + (s3 - s2) * h * self.slope[i + 1]
    }

    /// Interpolated `D(β)` for β inside the grid.
    pub fn demand(&self, beta: f64) -> Result<f64> {
        let n = self.len();
        if !(beta >= self.betas[0] && beta <= self.betas[n - 1]) {
            return Err(Error::OutOfRange(format!(
                "beta {beta} outside the tabulated grid"
            )));
        }
        if n == 1 {
            return Ok(self.d[0]);
        }
        let i = self.betas.partition_point(|&b| b <= beta).clamp(1, n - 1) - 1;
        Ok(self.hermite(i, beta.ln()))
    }

    /// Interpolated inverse `β(D)` for D inside the tabulated range.
    pub fn invert(&self, d: f64) -> Result<f64> {
        let n = self.len();
        let (d_hi, d_lo) = (self.d[0], self.d[n - 1]);
        if !(d <= d_hi && d >= d_lo) {
            return Err(Error::OutOfRange(format!(
                "demand {d} outside the tabulated range [{d_lo}, {d_hi}]"
            )));
        }
        if n == 1 {
            return Ok(self.betas[0]);
        }
        // D is non-increasing along the grid.
        let i = self.d.partition_point(|&x| x > d).clamp(1, n - 1) - 1;
        let (mut lo, mut hi) = (self.betas[i].ln(), self.betas[i + 1].ln());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.hermite(i, mid) > d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    /// Falls back to [`invert_demand`] outside the tabulated range.
    pub fn invert_or_solve(&self, firm: &FirmDistribution, d: f64) -> Result<f64> {
        match self.invert(d) {
            Err(Error::OutOfRange(_)) => invert_demand(firm, d),
            r => r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gb2::Gb2Params;
    use approx::assert_relative_eq;

    fn firm() -> FirmDistribution {
        FirmDistribution::gb2(Gb2Params::new(1.8, 1.0, 3.0, 50.0).unwrap())
    }

    #[test]
    fn columns_follow_invariants() {
        let f = firm();
        let grid = geometric_grid(1e-6, 1.0, 60);
        let t = tabulate_equilibrium(&f, &grid).unwrap();
        assert!(t.d().windows(2).all(|w| w[1] < w[0]));
        assert!(t.z().windows(2).all(|w| w[1] < w[0]));
        assert!(t.z().iter().all(|&z| z > 0.0 && z <= 1.0));
        for (b, z) in t.betas().iter().zip(t.z()) {
            assert!((partition_function(&f, *b).unwrap() - z).abs() < 1e-9);
        }
        let m0 = mean_demand(&f, 0.0).unwrap();
        assert!((t.d()[0] - m0) / m0 < 1e-2);
        assert!(t.d()[59] < 0.05 * m0);
    }

    #[test]
    fn interpolated_inverse_matches_direct() {
        let f = firm();
        let grid = geometric_grid(1e-7, 10.0, 200);
        let t = tabulate_equilibrium(&f, &grid).unwrap();
        let m0 = mean_demand(&f, 0.0).unwrap();
        for frac in [0.031, 0.1234, 0.25, 0.5, 0.777, 0.9, 0.95] {
            let d = frac * m0;
            let direct = invert_demand(&f, d).unwrap();
            let interp = t.invert(d).unwrap();
            assert_relative_eq!(interp, direct, max_relative = 1e-6);
        }
        let b = 0.0123;
        assert_relative_eq!(
            t.demand(b).unwrap(),
            mean_demand(&f, b).unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn rejects_bad_grids_and_ranges() {
        let f = firm();
        assert!(tabulate_equilibrium(&f, &[]).is_err());
        assert!(tabulate_equilibrium(&f, &[0.0, 1.0]).is_err());
        assert!(tabulate_equilibrium(&f, &[1.0, 1.0]).is_err());
        let t = tabulate_equilibrium(&f, &[0.01, 0.1]).unwrap();
        assert!(matches!(
            t.invert(t.d()[0] * 1.01),
            Err(Error::OutOfRange(_))
        ));
        let d = 0.5 * (t.d()[0] + mean_demand(&f, 0.0).unwrap());
        let b = t.invert_or_solve(&f, d).unwrap();
        assert!(b < 0.01);
    }
}

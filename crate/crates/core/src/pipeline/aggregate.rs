use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::ProductivityRecord;

/// Unit over which productivity is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Worker,
    Firm,
    Sector,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Worker, Level::Firm, Level::Sector];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Worker => "worker",
            Level::Firm => "firm",
            Level::Sector => "sector",
        })
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worker" => Ok(Level::Worker),
            "firm" => Ok(Level::Firm),
            "sector" => Ok(Level::Sector),
            _ => Err(Error::Domain(format!(
                "unknown level `{s}` (expected worker, firm or sector)"
            ))),
        }
    }
}

/// Distinct values in ascending order, each with the number of units that
/// carry it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedSample {
    /// Builds a sample from parallel value/weight slices. Values may repeat
    /// and come in any order; zero weights are dropped.
    pub fn new(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidParams(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "values must be positive and finite, got {v}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "weights must be non-negative, got {w}"
            )));
        }
        let pairs: Vec<(f64, f64)> = values
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(v, w)| (*v, *w))
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self::from_pairs(pairs))
    }

    fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            if values.last() == Some(&v) {
                *weights.last_mut().expect("parallel vectors") += w;
            } else {
                values.push(v);
                weights.push(w);
            }
        }
        Self { values, weights }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn distinct(&self) -> usize {
        self.values.len()
    }

    /// Weighted mean `Σ w v / Σ w`.
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum::<f64>()
            / self.total_weight()
    }

    /// Smallest value `v` with at least a fraction `1 − tail` of the weight
    /// strictly below or at it, so that `tail` of the weight lies at or above.
    pub fn upper_quantile(&self, tail: f64) -> f64 {
        let target = (1.0 - tail) * self.total_weight();
        let mut cum = 0.0;
        for (v, w) in self.values.iter().zip(&self.weights) {
            if cum + w > target {
                return *v;
            }
            cum += w;
        }
        *self.values.last().expect("non-empty sample")
    }

    /// The sample with every value repeated `weight` times.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (v, w) in self.values.iter().zip(&self.weights) {
            out.extend(std::iter::repeat_n(*v, *w as usize));
        }
        out
    }
}

/// Ratio of sums per group, summed in a canonical order so that the result
/// does not depend on record order.
fn ratio_of_sums<'a, K: Fn(&'a ProductivityRecord) -> &'a str>(
    records: &'a [ProductivityRecord],
    key: K,
) -> Vec<(f64, f64)> {
    let mut groups: HashMap<&str, Vec<(f64, u64)>> = HashMap::new();
    for r in records {
        groups
            .entry(key(r))
            .or_default()
            .push((r.sales(), r.employees()));
    }
    let mut out: Vec<(f64, f64)> = groups
        .into_values()
        .map(|mut g| {
            g.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let y: f64 = g.iter().map(|p| p.0).sum();
            let l: u64 = g.iter().map(|p| p.1).sum();
            (y / l as f64, l as f64)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

/// Aggregation as a weighted sample.
///
/// * worker: each record's `c`, weighted by its employees;
/// * firm: `ΣY/ΣL` per firm id, weight 1;
/// * sector: `ΣY/ΣL` per sector id, weight 1.
pub fn aggregate_weighted(records: &[ProductivityRecord], level: Level) -> Result<WeightedSample> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let pairs: Vec<(f64, f64)> = match level {
        Level::Worker => records
            .iter()
            .map(|r| (r.c(), r.employees() as f64))
            .collect(),
        Level::Firm => ratio_of_sums(records, |r| r.firm_id())
            .into_iter()
            .map(|(c, _)| (c, 1.0))
            .collect(),
        Level::Sector => ratio_of_sums(records, |r| r.sector_id())
            .into_iter()
            .map(|(c, _)| (c, 1.0))
            .collect(),
    };
    // Equal ratios from different units merge into one value of weight > 1.
    Ok(WeightedSample::from_pairs(pairs))
}

/// Aggregation as a plain sample; the worker level replicates each record's
/// `c` once per employee.
pub fn aggregate(records: &[ProductivityRecord], level: Level) -> Result<Vec<f64>> {
    Ok(aggregate_weighted(records, level)?.expand())
}

/// Collapses records to one per firm: summed sales and employees, with the
/// sector of the firm's first record.
pub fn collapse_firms(records: &[ProductivityRecord]) -> Result<Vec<ProductivityRecord>> {
    let mut order: Vec<&str> = Vec::new();
    type Group<'a> = (Vec<(f64, u64)>, &'a str, i32);
    let mut groups: HashMap<&str, Group> = HashMap::new();
    for r in records {
        let e = groups.entry(r.firm_id()).or_insert_with(|| {
            order.push(r.firm_id());
            (Vec::new(), r.sector_id(), r.year())
        });
        e.0.push((r.sales(), r.employees()));
    }
    order
        .into_iter()
        .map(|id| {
            let (mut g, sector, year) = groups.remove(id).expect("every id was inserted");
            g.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let y: f64 = g.iter().map(|p| p.0).sum();
            let l: u64 = g.iter().map(|p| p.1).sum();
            ProductivityRecord::new(id, year, sector, y, l)
        })
        .collect()
}

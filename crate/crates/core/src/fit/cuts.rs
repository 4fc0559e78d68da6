use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::ProductivityRecord;

/// Outlier policy applied to one year of records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CutPolicy {
    /// Drop the `k` most productive records.
    TopK(usize),
    /// Drop records with productivity above `c_max`.
    Threshold(f64),
    None,
}

impl Default for CutPolicy {
    fn default() -> Self {
        CutPolicy::TopK(10)
    }
}

impl CutPolicy {
    /// Default absolute threshold, 10^9 yen/person.
    pub const DEFAULT_C_MAX: f64 = 1e9;

    pub fn validate(&self) -> Result<()> {
        match *self {
            CutPolicy::TopK(0) => Err(Error::InvalidParams("top-k cut needs k >= 1".into())),
            CutPolicy::Threshold(c) if !(c > 0.0) => Err(Error::InvalidParams(format!(
                "threshold cut needs c_max > 0, got {c}"
            ))),
            _ => Ok(()),
        }
    }

    /// Parses `top10`, `top<k>`, `threshold=<v>`, `threshold` or `none`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let policy = if s.eq_ignore_ascii_case("none") {
            CutPolicy::None
        } else if let Some(rest) = s.strip_prefix("top") {
            let k = if rest.is_empty() {
                10
            } else {
                rest.parse()
                    .map_err(|_| Error::InvalidParams(format!("bad top-k cut '{s}'")))?
            };
            CutPolicy::TopK(k)
        } else if s == "threshold" {
            CutPolicy::Threshold(Self::DEFAULT_C_MAX)
        } else if let Some(v) = s.strip_prefix("threshold=") {
            CutPolicy::Threshold(
                v.parse()
                    .map_err(|_| Error::InvalidParams(format!("bad threshold '{v}'")))?,
            )
        } else {
            return Err(Error::InvalidParams(format!("unknown cut policy '{s}'")));
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl std::fmt::Display for CutPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CutPolicy::TopK(k) => write!(f, "top{k}"),
            CutPolicy::Threshold(c) => write!(f, "threshold={c}"),
            CutPolicy::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutOutcome {
    pub kept: Vec<ProductivityRecord>,
    /// Set when a top-k cut removed every record.
    pub emptied: bool,
}

/// Applies `policy` to records of a single year. Surviving records keep their
/// input order.
pub fn apply_cuts(records: &[ProductivityRecord], policy: CutPolicy) -> Result<CutOutcome> {
    policy.validate()?;
    let kept = match policy {
        CutPolicy::None => records.to_vec(),
        CutPolicy::Threshold(c_max) => records.iter().filter(|r| r.c() <= c_max).cloned().collect(),
        CutPolicy::TopK(k) => {
            if records.len() <= k {
                return Ok(CutOutcome {
                    kept: Vec::new(),
                    emptied: true,
                });
            }
            // Largest c first; among ties the later record goes first.
            let mut order: Vec<usize> = (0..records.len()).collect();
            order.sort_by(|&a, &b| records[b].c().total_cmp(&records[a].c()).then(b.cmp(&a)));
            let mut drop = vec![false; records.len()];
            for &i in &order[..k] {
                drop[i] = true;
            }
            records
                .iter()
                .zip(drop)
                .filter(|(_, d)| !d)
                .map(|(r, _)| r.clone())
                .collect()
        }
    };
    Ok(CutOutcome {
        kept,
        emptied: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, c: f64) -> ProductivityRecord {
        ProductivityRecord::new(format!("f{id}"), 2005, "s", c * 10.0, 10).unwrap()
    }

    #[test]
    fn top_ten_of_three_thousand() {
        let rs: Vec<_> = (0..3000)
            .map(|i| rec(i, 1.0 + (i * 7919 % 3001) as f64))
            .collect();
        let out = apply_cuts(&rs, CutPolicy::TopK(10)).unwrap();
        assert_eq!(out.kept.len(), 2990);
        let max_kept = out.kept.iter().map(|r| r.c()).fold(0.0, f64::max);
        let mut cs: Vec<f64> = rs.iter().map(|r| r.c()).collect();
        cs.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(max_kept, cs[10]);
    }

    #[test]
    fn threshold_cut() {
        let rs = vec![rec(0, 2e9), rec(1, 5e8)];
        let out = apply_cuts(&rs, CutPolicy::Threshold(1e9)).unwrap();
        assert_eq!(out.kept, vec![rs[1].clone()]);
    }

    #[test]
    fn none_is_identity() {
        let rs: Vec<_> = (0..5).map(|i| rec(i, i as f64 + 1.0)).collect();
        assert_eq!(apply_cuts(&rs, CutPolicy::None).unwrap().kept, rs);
    }

    #[test]
    fn ties_remove_later_records_first() {
        let rs = vec![rec(0, 5.0), rec(1, 9.0), rec(2, 9.0), rec(3, 1.0)];
        let out = apply_cuts(&rs, CutPolicy::TopK(1)).unwrap();
        let ids: Vec<_> = out.kept.iter().map(|r| r.firm_id().to_string()).collect();
        assert_eq!(ids, ["f0", "f1", "f3"]);
    }

    #[test]
    fn top_k_larger_than_input_flags_empty() {
        let rs: Vec<_> = (0..4).map(|i| rec(i, 1.0)).collect();
        let out = apply_cuts(&rs, CutPolicy::TopK(4)).unwrap();
        assert!(out.kept.is_empty() && out.emptied);
    }

    #[test]
    fn threshold_is_idempotent_and_top_k_composes() {
        let rs: Vec<_> = (0..100)
            .map(|i| rec(i, ((i * 37) % 101) as f64 + 0.5))
            .collect();
        let once = apply_cuts(&rs, CutPolicy::Threshold(50.0)).unwrap().kept;
        let twice = apply_cuts(&once, CutPolicy::Threshold(50.0)).unwrap().kept;
        assert_eq!(once, twice);
        let a = apply_cuts(&rs, CutPolicy::TopK(7)).unwrap().kept;
        let b = apply_cuts(&a, CutPolicy::TopK(7)).unwrap().kept;
        assert_eq!(b.len(), 100 - 14);
    }

    #[test]
    fn parse_policies() {
        assert_eq!(CutPolicy::parse("top10").unwrap(), CutPolicy::TopK(10));
        assert_eq!(CutPolicy::parse("top20").unwrap(), CutPolicy::TopK(20));
        assert_eq!(
            CutPolicy::parse("threshold=1e9").unwrap(),
            CutPolicy::Threshold(1e9)
        );
        assert_eq!(CutPolicy::parse("none").unwrap(), CutPolicy::None);
        assert!(CutPolicy::parse("top0").is_err());
        assert!(CutPolicy::parse("threshold=-3").is_err());
        assert!(CutPolicy::parse("bogus").is_err());
    }
}

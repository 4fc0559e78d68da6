use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_weighted, collapse_firms, Level, WeightedSample};
use super::io::group_by_year;
use crate::error::{Error, Result};
use crate::fit::{
    apply_cuts, fit_gb2_mle_with, hill_estimator_weighted, CutPolicy, FitOptions, MIN_FIT_SAMPLES,
};
use crate::gb2::Gb2Params;
use crate::record::ProductivityRecord;
use crate::superstat::infer_delta;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisOptions {
    pub cut: CutPolicy,
    pub fit: FitOptions,
    /// Fit the worker level only on the top fraction of worker weight, with
    /// the likelihood truncated accordingly.
    pub worker_tail: Option<f64>,
}

/// Fit of one aggregation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFit {
    pub level: Level,
    /// Number of units: workers, firms or sectors.
    pub units: f64,
    pub distinct: usize,
    pub mu: Option<f64>,
    pub se_mu: Option<f64>,
    pub params: Option<Gb2Params>,
    pub log_likelihood: Option<f64>,
    pub converged: bool,
    /// Hill index over the top `1/√distinct` share of the weight.
    pub hill: Option<f64>,
    pub note: Option<String>,
}

/// Hill index with `k = ⌊W/√m⌋` for total weight `W` over `m` distinct values;
/// for unit weights this is the usual `⌊√n⌋`.
pub fn hill_for(sample: &WeightedSample) -> Result<f64> {
    let w = sample.total_weight();
    let k = (w / (sample.distinct() as f64).sqrt()).floor().max(1.0);
    hill_estimator_weighted(&sample.values, &sample.weights, k)
}

pub fn fit_sample(
    sample: &WeightedSample,
    level: Level,
    fit: &FitOptions,
    tail: Option<f64>,
) -> LevelFit {
    let mut out = LevelFit {
        level,
        units: sample.total_weight(),
        distinct: sample.distinct(),
        mu: None,
        se_mu: None,
        params: None,
        log_likelihood: None,
        converged: false,
        hill: hill_for(sample).ok(),
        note: None,
    };
    let mut opts = *fit;
    if let Some(f) = tail {
        opts.window = Some((sample.upper_quantile(f), f64::INFINITY));
    }
    match fit_gb2_mle_with(&sample.values, Some(&sample.weights), &opts) {
        Ok(r) => {
            out.converged = r.converged;
            out.mu = Some(r.params.mu());
            out.se_mu = Some(r.se_mu);
            out.params = Some(r.params);
            out.log_likelihood = Some(r.log_likelihood);
            if !r.converged {
                out.note = Some("fit did not converge".into());
            }
        }
        Err(e) => out.note = Some(e.to_string()),
    }
    out
}

/// Fit of one level of one year's records.
pub fn fit_level(
    records: &[ProductivityRecord],
    level: Level,
    opts: &AnalysisOptions,
) -> Result<LevelFit> {
    let kept = cut_records(records, opts.cut)?.0;
    if kept.is_empty() {
        return Err(Error::EmptySample);
    }
    let sample = aggregate_weighted(&kept, level)?;
    let tail = if level == Level::Worker {
        opts.worker_tail
    } else {
        None
    };
    Ok(fit_sample(&sample, level, &opts.fit, tail))
}

/// Applies the cut to firms (records pooled per firm id) and keeps every
/// record of the surviving firms. Returns the records, the number of
/// surviving firms and whether the cut emptied the year.
pub fn cut_records(
    records: &[ProductivityRecord],
    cut: CutPolicy,
) -> Result<(Vec<ProductivityRecord>, usize, bool)> {
    if let Some(w) = records.windows(2).find(|w| w[0].year() != w[1].year()) {
        return Err(Error::Domain(format!(
            "records span several years ({} and {})",
            w[0].year(),
            w[1].year()
        )));
    }
    let firms = collapse_firms(records)?;
    let outcome = apply_cuts(&firms, cut)?;
    let keep: HashSet<&str> = outcome.kept.iter().map(|r| r.firm_id()).collect();
    let kept = records
        .iter()
        .filter(|r| keep.contains(r.firm_id()))
        .cloned()
        .collect();
    Ok((kept, keep.len(), outcome.emptied))
}

/// Per-year indices at the three levels and the inferred demand exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearReport {
    pub year: i32,
    pub cut_policy: String,
    pub cut_emptied: bool,
    pub n_firms: usize,
    pub n_workers: u64,
    pub n_sectors: usize,
    pub worker: LevelFit,
    pub firm: LevelFit,
    pub sector: LevelFit,
    pub delta: Option<f64>,
    /// False when `μ_W ≤ μ_F`, outside what the theory allows.
    pub delta_consistent: Option<bool>,
    /// Whether `μ_W > μ_F > μ_S` held.
    pub law2_ordering: bool,
}

pub fn analyze_year(records: &[ProductivityRecord], cut: CutPolicy) -> Result<YearReport> {
    analyze_year_with(
        records,
        &AnalysisOptions {
            cut,
            ..AnalysisOptions::default()
        },
    )
}

pub fn analyze_year_with(
    records: &[ProductivityRecord],
    opts: &AnalysisOptions,
) -> Result<YearReport> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let year = records[0].year();
    let (kept, n_firms, emptied) = cut_records(records, opts.cut)?;
    if n_firms < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: n_firms,
        });
    }
    let samples: Vec<WeightedSample> = Level::ALL
        .iter()
        .map(|&l| aggregate_weighted(&kept, l))
        .collect::<Result<_>>()?;
    let mut fits: Vec<LevelFit> = Level::ALL
        .par_iter()
        .zip(samples.par_iter())
        .map(|(&l, s)| {
            fit_sample(
                s,
                l,
                &opts.fit,
                if l == Level::Worker {
                    opts.worker_tail
                } else {
                    None
                },
            )
        })
        .collect();
    let sector = fits.pop().expect("three levels");
    let firm = fits.pop().expect("three levels");
    let worker = fits.pop().expect("three levels");

    let (mut delta, mut delta_consistent) = (None, None);
    if let (true, true, Some(mf), Some(mw)) = (firm.converged, worker.converged, firm.mu, worker.mu)
    {
        if let Ok(d) = infer_delta(mf, mw) {
            delta = Some(d.delta);
            delta_consistent = Some(d.consistent);
        }
    }
    let law2_ordering = match (worker.converged, firm.converged, sector.converged) {
        (true, true, true) => {
            let (w, f, s) = (
                worker.mu.unwrap_or(f64::NAN),
                firm.mu.unwrap_or(f64::NAN),
                sector.mu.unwrap_or(f64::NAN),
            );
            w > f && f > s
        }
        _ => false,
    };
    Ok(YearReport {
        year,
        cut_policy: opts.cut.to_string(),
        cut_emptied: emptied,
        n_firms,
        n_workers: kept.iter().map(|r| r.employees()).sum(),
        n_sectors: sector.units as usize,
        worker,
        firm,
        sector,
        delta,
        delta_consistent,
        law2_ordering,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedYear {
    pub year: i32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub reports: Vec<YearReport>,
    pub skipped: Vec<SkippedYear>,
}

/// Analyzes every year independently, in parallel; output is ordered by
/// year. Years that cannot be analyzed are listed in `skipped`.
pub fn analyze(records: &[ProductivityRecord], opts: &AnalysisOptions) -> Analysis {
    let years: Vec<(i32, Vec<ProductivityRecord>)> = group_by_year(records).into_iter().collect();
    let results: Vec<(i32, Result<YearReport>)> = years
        .par_iter()
        .map(|(y, rs)| (*y, analyze_year_with(rs, opts)))
        .collect();
    let mut out = Analysis {
        reports: Vec::new(),
        skipped: Vec::new(),
    };
    for (year, r) in results {
        match r {
            Ok(rep) => out.reports.push(rep),
            Err(e) => out.skipped.push(SkippedYear {
                year,
                reason: e.to_string(),
            }),
        }
    }
    out
}

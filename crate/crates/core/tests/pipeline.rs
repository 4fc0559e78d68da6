use std::fs;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prodstat::fit::CutPolicy;
use prodstat::gb2::gb2_sample;
use prodstat::pipeline::{
    aggregate, aggregate_weighted, analyze, analyze_year, analyze_year_with, emit_plotdata,
    ingest_csv, rank_size, render_text, synth_generate, write_csv, write_report, AnalysisOptions,
    Level, SynthConfig,
};
use prodstat::{Error, Gb2Params, ProductivityRecord};

fn rec(firm: &str, sector: &str, y: f64, l: u64) -> ProductivityRecord {
    ProductivityRecord::new(firm, 2003, sector, y, l).unwrap()
}

#[test]
fn ingest_computes_productivity_and_skips_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.csv");
    fs::write(
        &path,
        "firm_id,year,sector_id,sales_yen,employees\n\
         A,2001,S1,100e6,50\n\
         B,2001,S1,3e6,0\n\
         C,2001,S2,-5,3\n\
         D,2001,S2,7e6,7\n",
    )
    .unwrap();
    let got = ingest_csv(&path).unwrap();
    assert_eq!(got.records.len(), 2);
    assert_eq!(got.records[0].c(), 2e6);
    let lines: Vec<u64> = got.rejected.iter().map(|r| r.line).collect();
    assert_eq!(lines, [3, 4]);
    assert!(got.rejected[0].reason.contains("employees"));
}

#[test]
fn missing_column_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.csv");
    fs::write(&path, "firm_id,year,sales_yen,employees\nA,2001,1,1\n").unwrap();
    assert!(matches!(ingest_csv(&path), Err(Error::Schema { .. })));
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let p = Gb2Params::new(1.7, 1.1, 2.0, 3e6).unwrap();
    let cs = gb2_sample(&p, 5, 1000).unwrap();
    let records: Vec<_> = cs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let l = 1 + (i as u64 * 7919) % 5000;
            ProductivityRecord::new(
                format!("F{i}"),
                1990 + (i % 20) as i32,
                format!("S{}", i % 33),
                c * l as f64,
                l,
            )
            .unwrap()
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rt.csv");
    write_csv(&records, &path).unwrap();
    let back = ingest_csv(&path).unwrap();
    assert!(back.rejected.is_empty());
    assert_eq!(back.records, records);
    for (a, b) in back.records.iter().zip(&records) {
        assert_eq!(a.sales().to_bits(), b.sales().to_bits());
        assert_eq!(a.c().to_bits(), b.c().to_bits());
    }
}

#[test]
fn aggregation_levels() {
    let rs = vec![rec("a", "s", 100.0, 10), rec("b", "s", 50.0, 5)];
    assert_eq!(aggregate(&rs, Level::Sector).unwrap(), vec![10.0]);
    let workers = aggregate(&rs, Level::Worker).unwrap();
    assert_eq!(workers.len(), 15);
    assert!(workers.iter().all(|&c| c == 10.0));
    assert!(matches!(
        aggregate(&[], Level::Firm),
        Err(Error::EmptySample)
    ));
}

#[test]
fn worker_mean_is_the_realized_demand() {
    let config = SynthConfig {
        firms: 500,
        workers: 100_000,
        periods: 1,
        seed: 4,
        ..SynthConfig::default()
    };
    let panel = synth_generate(&config).unwrap();
    let s = aggregate_weighted(&panel.records, Level::Worker).unwrap();
    let counts = &panel.periods[0].counts;
    let realized: f64 = counts
        .iter()
        .zip(&panel.levels)
        .map(|(&n, &c)| n as f64 * c)
        .sum::<f64>()
        / config.workers as f64;
    assert!((s.mean() - realized).abs() <= 1e-12 * realized);
    assert_eq!(s.total_weight(), config.workers as f64);
}

#[test]
fn plotdata_rank_construction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.dat");
    emit_plotdata(&[2.0, 1.0, 4.0], &path).unwrap();
    let body = fs::read_to_string(&path).unwrap();
    let rows: Vec<(f64, f64)> = body
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rows, vec![(4.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (1.0, 1.0)]);
}

#[test]
fn rank_size_slope_matches_tail_index() {
    let p = Gb2Params::new(2.2, 1.2, 1.0, 100.0).unwrap();
    let xs = gb2_sample(&p, 77, 100_000).unwrap();
    let pts = rank_size(&xs, None).unwrap();
    // Decade ending at the tenth largest value; the maximum alone is erratic.
    let top = pts[9].0;
    let xy: Vec<(f64, f64)> = pts
        .iter()
        .filter(|q| q.0 <= top && q.0 >= top / 10.0)
        .map(|q| (q.0.ln(), q.1.ln()))
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|q| q.0).sum::<f64>() / n;
    let my = xy.iter().map(|q| q.1).sum::<f64>() / n;
    let slope = xy.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum::<f64>()
        / xy.iter().map(|q| (q.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 2.2).abs() <= 0.22, "slope {slope}");
}

#[test]
fn too_few_firms() {
    let rs: Vec<_> = (0..40)
        .map(|i| rec(&format!("f{i}"), "s", 10.0 + i as f64, 2))
        .collect();
    assert!(matches!(
        analyze_year(&rs, CutPolicy::None),
        Err(Error::InsufficientData { .. })
    ));
}

#[test]
fn synthetic_panel_round_trips_through_analysis() {
    let config = SynthConfig::default();
    let panel = synth_generate(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("panel.csv");
    write_csv(&panel.records, &csv).unwrap();
    let records = ingest_csv(&csv).unwrap().records;
    assert_eq!(records, panel.records);

    // Synthetic panels have no outliers to remove.
    let opts = AnalysisOptions {
        cut: CutPolicy::None,
        worker_tail: Some(0.3),
        ..AnalysisOptions::default()
    };
    let a = analyze(&records, &opts);
    assert_eq!(a.reports.len(), 1);
    let r = &a.reports[0];
    let mu_w = r.worker.mu.unwrap();
    let delta = r.delta.unwrap();
    assert!((mu_w - 2.2).abs() <= 0.15, "mu_w = {mu_w}");
    assert!((delta - 0.5).abs() <= 0.15, "delta = {delta}");

    let txt = dir.path().join("report.txt");
    let json = dir.path().join("report.json");
    write_report(&a, &txt).unwrap();
    write_report(&a, &json).unwrap();
    assert_eq!(fs::read_to_string(&txt).unwrap(), render_text(&a));
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["reports"][0]["year"], 2000);
}

#[test]
fn report_is_invariant_under_record_order() {
    let config = SynthConfig {
        firms: 600,
        workers: 60_000,
        periods: 10,
        seed: 21,
        ..SynthConfig::default()
    };
    let panel = synth_generate(&config).unwrap();
    let mut shuffled = panel.records.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let opts = AnalysisOptions::default();
    let a = analyze_year_with(&panel.records, &opts).unwrap();
    let b = analyze_year_with(&shuffled, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn identical_config_gives_identical_records() {
    let config = SynthConfig {
        firms: 300,
        workers: 30_000,
        periods: 8,
        seed: 12,
        ..SynthConfig::default()
    };
    assert_eq!(
        synth_generate(&config).unwrap().records,
        synth_generate(&config).unwrap().records
    );
}

//! Aggregation laws on synthetic panels: Pareto tails at every level and the
//! ordering of indices between workers and firms.

use rayon::prelude::*;

use prodstat::fit::CutPolicy;
use prodstat::pipeline::{
    aggregate_weighted, analyze_year_with, rank_size, synth_generate, AnalysisOptions, Level,
    SynthConfig,
};

fn panel(delta: f64, seed: u64) -> SynthConfig {
    SynthConfig {
        firms: 2_000,
        workers: 200_000,
        periods: 50,
        delta,
        seed,
        ..SynthConfig::default()
    }
}

/// R² of the least-squares line through `(ln c, ln P>)` over the decade of
/// `c` that ends at `top`.
fn decade_r2(points: &[(f64, f64)], top: f64) -> (f64, usize) {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 <= top && p.0 >= top / 10.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    (sxy * sxy / (sxx * syy), xy.len())
}

#[test]
fn pareto_tail_at_every_level() {
    for (seed, delta) in [(3, 0.2), (4, 0.5), (5, 0.8)] {
        let config = SynthConfig {
            delta,
            seed,
            ..SynthConfig::default()
        };
        let p = synth_generate(&config).unwrap();
        for level in Level::ALL {
            let s = aggregate_weighted(&p.records, level).unwrap();
            let pts = rank_size(&s.values, Some(&s.weights)).unwrap();
            // The sample maximum alone is too erratic to anchor the decade.
            let (r2, n) = decade_r2(&pts, s.upper_quantile(1e-3));
            println!("delta={delta} {level}: R2={r2:.4} over {n} points");
            assert!(n >= 3, "{level}: top decade has only {n} points");
            assert!(r2 >= 0.98, "{level} at delta={delta}: R2={r2}");
        }
    }
}

#[test]
fn workers_have_larger_index_than_firms() {
    let opts = AnalysisOptions {
        cut: CutPolicy::None,
        worker_tail: Some(0.3),
        ..AnalysisOptions::default()
    };
    for delta in [0.2, 0.5, 0.8] {
        let held: Vec<bool> = (0..20u64)
            .into_par_iter()
            .map(|seed| {
                let p = synth_generate(&panel(delta, 100 + seed)).unwrap();
                let r = analyze_year_with(&p.records, &opts).unwrap();
                let (w, f) = (
                    r.worker.mu.unwrap_or(f64::NAN),
                    r.firm.mu.unwrap_or(f64::NAN),
                );
                println!("delta={delta} seed={seed}: mu_w={w:.3} mu_f={f:.3}");
                w > f
            })
            .collect();
        let count = held.iter().filter(|h| **h).count();
        assert!(
            count >= 19,
            "delta={delta}: ordering held in {count}/20 seeds"
        );
    }
}

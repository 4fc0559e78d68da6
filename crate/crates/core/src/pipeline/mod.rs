//! Data pipeline: CSV ingestion, aggregation to worker, firm and sector
//! level, per-year fits, synthetic panels and rank-size output.

mod aggregate;
mod analysis;
mod io;
mod report;
mod synth;

pub use aggregate::{aggregate, aggregate_weighted, collapse_firms, Level, WeightedSample};
pub use analysis::{
    analyze, analyze_year, analyze_year_with, cut_records, fit_level, fit_sample, hill_for,
    Analysis, AnalysisOptions, LevelFit, SkippedYear, YearReport,
};
pub use io::{
    emit_plotdata, emit_plotdata_weighted, group_by_year, ingest_csv, rank_size, write_csv,
    write_csv_to, Ingested, Rejection, CSV_COLUMNS,
};
pub use report::{format_g, render_fits, render_json, render_text, write_report};
pub use synth::{
    allocate_periods, draw_firm_levels, multinomial, synth_generate, PeriodDraw, SynthConfig,
    SynthPanel,
};

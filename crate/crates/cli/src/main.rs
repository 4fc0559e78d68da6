use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prodstat::fit::{CutPolicy, FitOptions};
use prodstat::pipeline::{
    aggregate_weighted, analyze, cut_records, emit_plotdata_weighted, fit_level, format_g,
    group_by_year, ingest_csv, render_fits, render_text, synth_generate, write_csv, write_csv_to,
    write_report, AnalysisOptions, Ingested, Level, SynthConfig,
};
use prodstat::superstat::{gamma_from_delta, infer_delta, predict_mu_w};
use prodstat::{Gb2Params, ProductivityRecord};

/// Pareto-index analysis of labour productivity across workers, firms and
/// sectors.
#[derive(Parser)]
#[command(name = "prodstat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit GB2 and Hill indices at one or all aggregation levels.
    Fit {
        csv: PathBuf,
        /// Only this year; every year when omitted.
        #[arg(long)]
        year: Option<i32>,
        /// Aggregation level; all three when omitted.
        #[arg(long)]
        level: Option<Level>,
        #[command(flatten)]
        common: Common,
    },
    /// Per-year report of all levels and the inferred demand exponent.
    Analyze {
        csv: PathBuf,
        /// Write here instead of stdout; `.json` selects JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a synthetic panel by Boltzmann allocation of workers.
    Synth(SynthArgs),
    /// Write rank-size plot data for one level and year.
    Plotdata {
        csv: PathBuf,
        #[arg(long)]
        level: Level,
        #[arg(long)]
        year: i32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "top10", value_parser = parse_cut)]
        cut: CutPolicy,
    },
    /// Worker index predicted from the firm index and demand exponent.
    Predict {
        #[arg(long, allow_hyphen_values = true)]
        mu_f: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Demand exponent implied by firm and worker indices.
    InferDelta {
        #[arg(long, allow_hyphen_values = true)]
        mu_f: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu_w: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Outlier cut: top10, top<k>, threshold=<v> or none.
    #[arg(long, default_value = "top10", value_parser = parse_cut)]
    cut: CutPolicy,
    /// Fit workers only on this top fraction of worker weight.
    #[arg(long)]
    worker_tail: Option<f64>,
    /// Number of simplex starts per fit.
    #[arg(long, default_value_t = FitOptions::default().starts)]
    starts: usize,
}

impl Common {
    fn options(&self) -> Result<AnalysisOptions, String> {
        if let Some(f) = self.worker_tail {
            if !(f > 0.0 && f <= 1.0) {
                return Err(format!("--worker-tail must be in (0, 1], got {f}"));
            }
        }
        Ok(AnalysisOptions {
            cut: self.cut,
            fit: FitOptions {
                starts: self.starts.max(1),
                ..FitOptions::default()
            },
            worker_tail: self.worker_tail,
        })
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10_000)]
    firms: usize,
    #[arg(long, default_value_t = 1_000_000)]
    workers: u64,
    /// Firm Pareto index μ.
    #[arg(long, default_value_t = 1.8)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, default_value_t = 3.0)]
    q: f64,
    #[arg(long, default_value_t = 50.0)]
    c1: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, default_value_t = 200)]
    periods: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    sectors: usize,
    #[arg(long, default_value_t = 2000)]
    year: i32,
    /// Draw firm levels independently instead of one per stratum.
    #[arg(long)]
    independent: bool,
    /// Write the panel here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_cut(s: &str) -> Result<CutPolicy, String> {
    CutPolicy::parse(s).map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<Vec<ProductivityRecord>, String> {
    let Ingested { records, rejected } = ingest_csv(path).map_err(|e| e.to_string())?;
    for r in &rejected {
        eprintln!(
            "warning: {}:{}: row rejected: {}",
            path.display(),
            r.line,
            r.reason
        );
    }
    if records.is_empty() {
        return Err(format!("{}: no valid records", path.display()));
    }
    Ok(records)
}

fn emit(text: &str) -> Result<(), String> {
    io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| format!("writing stdout: {e}"))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Fit {
            csv,
            year,
            level,
            common,
        } => {
            let opts = common.options()?;
            let records = load(&csv)?;
            let by_year = group_by_year(&records);
            let years: Vec<i32> = match year {
                Some(y) if by_year.contains_key(&y) => vec![y],
                Some(y) => return Err(format!("no records for year {y}")),
                None => by_year.keys().copied().collect(),
            };
            let levels = level.map_or(Level::ALL.to_vec(), |l| vec![l]);
            let mut fits = Vec::new();
            for y in years {
                for &l in &levels {
                    match fit_level(&by_year[&y], l, &opts) {
                        Ok(f) => fits.push((y, f)),
                        Err(e) => eprintln!("warning: year {y} level {l}: {e}"),
                    }
                }
            }
            emit(&render_fits(&fits))
        }
        Command::Analyze { csv, out, common } => {
            let opts = common.options()?;
            let records = load(&csv)?;
            let a = analyze(&records, &opts);
            for s in &a.skipped {
                eprintln!("warning: year {} skipped: {}", s.year, s.reason);
            }
            match out {
                Some(p) => write_report(&a, &p).map_err(|e| e.to_string()),
                None => emit(&render_text(&a)),
            }
        }
        Command::Synth(s) => {
            let firm_params = Gb2Params::new(s.mu, s.nu, s.q, s.c1).map_err(|e| e.to_string())?;
            let config = SynthConfig {
                firms: s.firms,
                workers: s.workers,
                firm_params,
                delta: s.delta,
                periods: s.periods,
                seed: s.seed,
                sectors: s.sectors,
                year: s.year,
                stratified: !s.independent,
            };
            let panel = synth_generate(&config).map_err(|e| e.to_string())?;
            match s.out {
                Some(p) => write_csv(&panel.records, &p).map_err(|e| e.to_string()),
                None => {
                    write_csv_to(&panel.records, io::stdout().lock()).map_err(|e| e.to_string())
                }
            }
        }
        Command::Plotdata {
            csv,
            level,
            year,
            out,
            cut,
        } => {
            let records: Vec<_> = load(&csv)?
                .into_iter()
                .filter(|r| r.year() == year)
                .collect();
            if records.is_empty() {
                return Err(format!("no records for year {year}"));
            }
            let (records, _, emptied) = cut_records(&records, cut).map_err(|e| e.to_string())?;
            if emptied {
                return Err(format!("cut {cut} removed every firm of year {year}"));
            }
            let sample = aggregate_weighted(&records, level).map_err(|e| e.to_string())?;
            emit_plotdata_weighted(&sample.values, Some(&sample.weights), &out)
                .map_err(|e| e.to_string())
        }
        Command::Predict { mu_f, delta } => {
            let mu_w = predict_mu_w(mu_f, delta).map_err(|e| e.to_string())?;
            let mut text = format!("mu_w = {}\n", format_g(mu_w));
            match gamma_from_delta(delta, mu_f) {
                Ok(g) => text.push_str(&format!("gamma = {}\n", format_g(g))),
                Err(_) => text.push_str("gamma = NA\n"),
            }
            emit(&text)
        }
        Command::InferDelta { mu_f, mu_w } => {
            let est = infer_delta(mu_f, mu_w).map_err(|e| e.to_string())?;
            if !est.consistent {
                eprintln!(
                    "warning: mu_w <= mu_f violates the theory; delta >= 1 is not normalizable"
                );
            }
            emit(&format!(
                "delta = {}\nconsistent = {}\n",
                format_g(est.delta),
                est.consistent
            ))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

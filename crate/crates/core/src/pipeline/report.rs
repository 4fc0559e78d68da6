//! Report serialization.
//!
//! The text form is one `[year Y]` block per year followed by `key = value`
//! lines. Numbers carry 6 significant digits; absent values print as `NA`.

use std::fmt::Write as _;
use std::path::Path;

use super::analysis::{Analysis, LevelFit, YearReport};
use crate::error::{Error, Result};

/// `%g`-style formatting with 6 significant digits.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), format_g)
}

fn level_lines(out: &mut String, key: &str, f: &LevelFit) {
    let _ = writeln!(out, "{key} = {}", opt(f.mu));
    let _ = writeln!(out, "{key}_se = {}", opt(f.se_mu));
    let _ = writeln!(out, "{key}_hill = {}", opt(f.hill));
    let _ = writeln!(out, "{key}_converged = {}", f.converged);
    match &f.params {
        Some(p) => {
            let _ = writeln!(
                out,
                "{key}_gb2 = {} {} {} {}",
                format_g(p.mu()),
                format_g(p.nu()),
                format_g(p.q()),
                format_g(p.c1())
            );
        }
        None => {
            let _ = writeln!(out, "{key}_gb2 = NA");
        }
    }
    if let Some(n) = &f.note {
        let _ = writeln!(out, "{key}_note = {}", n.replace('\n', " "));
    }
}

fn year_block(out: &mut String, r: &YearReport) {
    let _ = writeln!(out, "[year {}]", r.year);
    let _ = writeln!(out, "cut_policy = {}", r.cut_policy);
    let _ = writeln!(out, "cut_emptied = {}", r.cut_emptied);
    let _ = writeln!(out, "n_firms = {}", r.n_firms);
    let _ = writeln!(out, "n_workers = {}", r.n_workers);
    let _ = writeln!(out, "n_sectors = {}", r.n_sectors);
    level_lines(out, "mu_w", &r.worker);
    level_lines(out, "mu_f", &r.firm);
    level_lines(out, "mu_s", &r.sector);
    let _ = writeln!(out, "delta = {}", opt(r.delta));
    let _ = writeln!(
        out,
        "delta_consistent = {}",
        r.delta_consistent
            .map_or("NA".to_string(), |b| b.to_string())
    );
    let _ = writeln!(out, "law2_ordering = {}", r.law2_ordering);
}

pub fn render_text(a: &Analysis) -> String {
    let mut out = String::from("# productivity report: key = value, one block per year\n");
    let mut blocks: Vec<(i32, String)> = Vec::new();
    for r in &a.reports {
        let mut s = String::new();
        year_block(&mut s, r);
        blocks.push((r.year, s));
    }
    for sk in &a.skipped {
        blocks.push((
            sk.year,
            format!(
                "[year {}]\nskipped = {}\n",
                sk.year,
                sk.reason.replace('\n', " ")
            ),
        ));
    }
    blocks.sort_by_key(|b| b.0);
    for (i, (_, b)) in blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(b);
    }
    out
}

/// Text form of single-level fits, one `[year Y level L]` block each.
pub fn render_fits(fits: &[(i32, LevelFit)]) -> String {
    let mut out = String::from("# level fits: key = value, one block per year and level\n");
    for (i, (year, f)) in fits.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[year {year} level {}]", f.level);
        let _ = writeln!(out, "units = {}", format_g(f.units));
        let _ = writeln!(out, "distinct = {}", f.distinct);
        level_lines(&mut out, "mu", f);
    }
    out
}

/// Pretty-printed JSON of the whole analysis, newline-terminated.
pub fn render_json(a: &Analysis) -> Result<String> {
    let mut s = serde_json::to_string_pretty(a)
        .map_err(|e| Error::Domain(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes JSON when the path ends in `.json`, the text form otherwise.
pub fn write_report(a: &Analysis, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        render_json(a)?
    } else {
        render_text(a)
    };
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(2.2), "2.2");
        assert_eq!(format_g(1.0 / 3.0), "0.333333");
        assert_eq!(format_g(123456.7), "123457");
        assert_eq!(format_g(999999.7), "1e+06");
        assert_eq!(format_g(1234567.0), "1.23457e+06");
        assert_eq!(format_g(0.0001234567), "0.000123457");
        assert_eq!(format_g(0.00001234567), "1.23457e-05");
        assert_eq!(format_g(-2.5e-300), "-2.5e-300");
        assert_eq!(format_g(100.0), "100");
        assert_eq!(format_g(f64::NAN), "nan");
    }
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::record::ProductivityRecord;

/// Required CSV columns, in the order [`write_csv`] emits them.
pub const CSV_COLUMNS: [&str; 5] = ["firm_id", "year", "sector_id", "sales_yen", "employees"];

/// A data row that failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number in the file (the header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub records: Vec<ProductivityRecord>,
    pub rejected: Vec<Rejection>,
}

impl Ingested {
    pub fn by_year(&self) -> BTreeMap<i32, Vec<ProductivityRecord>> {
        group_by_year(&self.records)
    }
}

pub fn group_by_year(records: &[ProductivityRecord]) -> BTreeMap<i32, Vec<ProductivityRecord>> {
    let mut out: BTreeMap<i32, Vec<ProductivityRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.year()).or_default().push(r.clone());
    }
    out
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads `firm_id,year,sector_id,sales_yen,employees`. Column order is free;
/// extra columns are ignored. Malformed rows are collected in
/// [`Ingested::rejected`] and do not stop the read.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(CSV_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema {
                path: path.to_path_buf(),
                msg: format!("missing column `{name}`"),
            })?;
    }

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                rejected.push(Rejection {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, &idx) {
            Ok(r) => records.push(r),
            Err(reason) => rejected.push(Rejection { line, reason }),
        }
    }
    Ok(Ingested { records, rejected })
}

fn parse_row(
    row: &csv::StringRecord,
    idx: &[usize; 5],
) -> std::result::Result<ProductivityRecord, String> {
    let field = |i: usize| {
        row.get(idx[i])
            .ok_or_else(|| format!("missing field `{}`", CSV_COLUMNS[i]))
    };
    let firm = field(0)?;
    if firm.is_empty() {
        return Err("empty firm_id".into());
    }
    let year: i32 = field(1)?
        .parse()
        .map_err(|_| format!("bad year `{}`", field(1).unwrap_or("")))?;
    let sector = field(2)?;
    let sales_s = field(3)?;
    let sales: f64 = sales_s
        .parse()
        .map_err(|_| format!("bad sales_yen `{sales_s}`"))?;
    if sales < 0.0 {
        return Err(format!("negative sales_yen {sales}"));
    }
    let emp_s = field(4)?;
    let employees: u64 = emp_s
        .parse()
        .map_err(|_| format!("bad employees `{emp_s}`"))?;
    if employees == 0 {
        return Err("employees = 0 (productivity would divide by zero)".into());
    }
    ProductivityRecord::new(firm, year, sector, sales, employees).map_err(|e| e.to_string())
}

/// Writes records in the ingestion schema. Sales use the shortest decimal
/// form that parses back to the same double.
pub fn write_csv(records: &[ProductivityRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(records, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// [`write_csv`] to any writer, e.g. stdout.
pub fn write_csv_to<W: Write>(records: &[ProductivityRecord], out: W) -> Result<()> {
    let sink = Path::new("<stream>");
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(|e| csv_err(sink, e))?;
    for r in records {
        w.write_record([
            r.firm_id(),
            &r.year().to_string(),
            r.sector_id(),
            &format!("{:?}", r.sales()),
            &r.employees().to_string(),
        ])
        .map_err(|e| csv_err(sink, e))?;
    }
    w.flush().map_err(|e| Error::io(sink, e))
}

/// Rank-size points `(c, P>)` for a weighted sample, largest `c` first.
///
/// `P>(c)` is the weight of values `≥ c` over the total weight, so ties
/// collapse onto their largest rank.
pub fn rank_size(values: &[f64], weights: Option<&[f64]>) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut pairs: Vec<(f64, f64)> = match weights {
        Some(w) => {
            if w.len() != values.len() {
                return Err(Error::Domain("values and weights differ in length".into()));
            }
            values.iter().copied().zip(w.iter().copied()).collect()
        }
        None => values.iter().map(|&v| (v, 1.0)).collect(),
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut cum = 0.0;
    for (v, w) in pairs {
        cum += w;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = cum,
            _ => out.push((v, cum)),
        }
    }
    for p in &mut out {
        p.1 /= total;
    }
    Ok(out)
}

/// Writes the rank-size plot of `sample` as two whitespace-separated columns.
pub fn emit_plotdata(sample: &[f64], out: impl AsRef<Path>) -> Result<()> {
    emit_plotdata_weighted(sample, None, out)
}

pub fn emit_plotdata_weighted(
    values: &[f64],
    weights: Option<&[f64]>,
    out: impl AsRef<Path>,
) -> Result<()> {
    let path = out.as_ref();
    let pts = rank_size(values, weights)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let total: f64 = weights.map_or(values.len() as f64, |w| w.iter().sum());
    (|| -> std::io::Result<()> {
        writeln!(w, "# rank-size plot: upper cdf P>(c) against c")?;
        writeln!(w, "# n = {total}, distinct = {}", pts.len())?;
        writeln!(w, "# c P>")?;
        for (c, p) in &pts {
            writeln!(w, "{c:e} {p:e}")?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::File::create(&p)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        p
    }

    #[test]
    fn parses_and_rejects_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "a.csv",
            "firm_id,year,sector_id,sales_yen,employees\n\
             A,2001,S1,100e6,50\n\
             B,2001,S1,5,0\n\
             C,2001,S2,-3,4\n\
             D,2001,S2,abc,4\n\
             E,2002,S3,7,1\n",
        );
        let got = ingest_csv(&p).unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.records[0].c(), 2e6);
        let lines: Vec<u64> = got.rejected.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(got.rejected[0].reason.contains("divide by zero"));
        assert!(got.rejected[1].reason.contains("negative"));
        assert_eq!(got.by_year().len(), 2);
    }

    #[test]
    fn missing_column_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "b.csv", "firm_id,year,sales_yen,employees\nA,1,2,3\n");
        assert!(matches!(ingest_csv(&p), Err(Error::Schema { .. })));
        assert!(matches!(
            ingest_csv(dir.path().join("nope.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let recs: Vec<ProductivityRecord> = (0..1000)
            .map(|i| {
                let sales = rng.random::<f64>() * 1e12 + 1e-3;
                ProductivityRecord::new(
                    format!("F{i}"),
                    1990 + i % 7,
                    format!("S{}", i % 13),
                    sales,
                    rng.random_range(1..100_000),
                )
                .unwrap()
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        write_csv(&recs, &p).unwrap();
        let back = ingest_csv(&p).unwrap();
        assert!(back.rejected.is_empty());
        assert_eq!(back.records, recs);
        for (a, b) in back.records.iter().zip(&recs) {
            assert_eq!(a.sales().to_bits(), b.sales().to_bits());
            assert_eq!(a.c().to_bits(), b.c().to_bits());
        }
    }

    #[test]
    fn rank_size_small_case() {
        let pts = rank_size(&[1.0, 2.0, 4.0], None).unwrap();
        assert_eq!(pts, vec![(4.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (1.0, 1.0)]);
        let pts = rank_size(&[2.0, 1.0, 2.0], None).unwrap();
        assert_eq!(pts, vec![(2.0, 2.0 / 3.0), (1.0, 1.0)]);
        let pts = rank_size(&[5.0, 1.0], Some(&[3.0, 1.0])).unwrap();
        assert_eq!(pts, vec![(5.0, 0.75), (1.0, 1.0)]);
        assert!(rank_size(&[], None).is_err());
    }

    #[test]
    fn plotdata_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.dat");
        emit_plotdata(&[1.0, 2.0, 4.0], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let rows: Vec<(f64, f64)> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| {
                let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        assert_eq!(rows[0], (4.0, 1.0 / 3.0));
        assert_eq!(rows[2], (1.0, 1.0));
        let bad = dir.path().join("no/such/dir/x.dat");
        assert!(matches!(emit_plotdata(&[1.0], &bad), Err(Error::Io { .. })));
    }
}

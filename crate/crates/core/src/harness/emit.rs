//! CSV and JSON persistence.
//!
//! CSV floats carry 17 significant digits so a parsed file reproduces the
//! in-memory values bit for bit; absent values are empty fields. JSON holds
//! the same fields with `null` for absent values.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::experiment::{AggregateRow, CondExpRow, FlowBatch, FlowRow, PathRow, PathsBatch};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown output format '{other}'"))),
        }
    }
}

pub const PATH_HEADER: [&str; 8] = ["trial", "seed", "k", "exists", "x_k", "s_k", "limit", "ratio"];
pub const AGGREGATE_HEADER: [&str; 7] =
    ["k", "n_exist", "ratio_mean", "ratio_median", "ratio_q05", "ratio_q95", "cond_mean_xk"];
pub const FLOW_HEADER: [&str; 9] =
    ["trial", "seed", "k", "feasible", "f_k", "s_k", "limit", "ratio", "greedy_ratio"];
pub const CONDEXP_HEADER: [&str; 8] =
    ["k", "trials", "n_exist", "cond_mean", "std_err", "limit", "ratio", "flagged"];

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// A row type with a fixed CSV layout.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for PathRow {
    const HEADER: &'static [&'static str] = &PATH_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.seed.to_string(),
            self.k.to_string(),
            u8::from(self.exists).to_string(),
            fmt_opt(self.x_k),
            fmt_opt(self.s_k),
            fmt_f64(self.limit),
            fmt_opt(self.ratio),
        ]
    }
}

impl CsvRecord for AggregateRow {
    const HEADER: &'static [&'static str] = &AGGREGATE_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.n_exist.to_string(),
            fmt_opt(self.ratio_mean),
            fmt_opt(self.ratio_median),
            fmt_opt(self.ratio_q05),
            fmt_opt(self.ratio_q95),
            fmt_opt(self.cond_mean_xk),
        ]
    }
}

impl CsvRecord for FlowRow {
    const HEADER: &'static [&'static str] = &FLOW_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.seed.to_string(),
            self.k.to_string(),
            u8::from(self.feasible).to_string(),
            fmt_opt(self.f_k),
            fmt_opt(self.s_k),
            fmt_f64(self.limit),
            fmt_opt(self.ratio),
            fmt_opt(self.greedy_ratio),
        ]
    }
}

impl CsvRecord for CondExpRow {
    const HEADER: &'static [&'static str] = &CONDEXP_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.trials.to_string(),
            self.n_exist.to_string(),
            fmt_opt(self.cond_mean),
            fmt_opt(self.std_err),
            fmt_f64(self.limit),
            fmt_opt(self.ratio),
            u8::from(self.flagged).to_string(),
        ]
    }
}

pub fn write_csv<T: CsvRecord, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn parse<T: FromStr>(field: &str, name: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("bad {name} value '{field}'")))
}

fn parse_opt(field: &str, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, name).map(Some)
    }
}

fn parse_flag(field: &str, name: &str) -> Result<bool> {
    match field {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(Error::Parse(format!("bad {name} flag '{field}'"))),
    }
}

fn read_records<R: Read>(input: R, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let got = r.headers().map_err(csv_err)?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header {got:?}")));
    }
    r.records().map(|rec| rec.map_err(csv_err)).collect()
}

pub fn read_paths_csv<R: Read>(input: R) -> Result<Vec<PathRow>> {
    read_records(input, &PATH_HEADER)?
        .iter()
        .map(|rec| {
            Ok(PathRow {
                trial: parse(&rec[0], "trial")?,
                seed: parse(&rec[1], "seed")?,
                k: parse(&rec[2], "k")?,
                exists: parse_flag(&rec[3], "exists")?,
                x_k: parse_opt(&rec[4], "x_k")?,
                s_k: parse_opt(&rec[5], "s_k")?,
                limit: parse(&rec[6], "limit")?,
                ratio: parse_opt(&rec[7], "ratio")?,
            })
        })
        .collect()
}

pub fn read_aggregates_csv<R: Read>(input: R) -> Result<Vec<AggregateRow>> {
    read_records(input, &AGGREGATE_HEADER)?
        .iter()
        .map(|rec| {
            Ok(AggregateRow {
                k: parse(&rec[0], "k")?,
                n_exist: parse(&rec[1], "n_exist")?,
                ratio_mean: parse_opt(&rec[2], "ratio_mean")?,
                ratio_median: parse_opt(&rec[3], "ratio_median")?,
                ratio_q05: parse_opt(&rec[4], "ratio_q05")?,
                ratio_q95: parse_opt(&rec[5], "ratio_q95")?,
                cond_mean_xk: parse_opt(&rec[6], "cond_mean_xk")?,
            })
        })
        .collect()
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Writes a file through `body`; on any failure the partial file is removed.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    let outcome = body(&mut w).and_then(|()| w.flush().map_err(Error::from));
    if outcome.is_err() {
        drop(w);
        let _ = fs::remove_file(path);
    }
    outcome
}

/// Sibling path with `suffix` replacing the extension, e.g. `run.csv -> run.agg.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Two-column `k ratio_mean` table for plotting.
pub fn write_gnuplot(aggregates: &[AggregateRow], path: &Path) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "# k ratio_mean")?;
        for a in aggregates {
            if let Some(m) = a.ratio_mean {
                writeln!(w, "{} {}", a.k, fmt_f64(m))?;
            }
        }
        Ok(())
    })
}

/// Persists a paths batch. CSV writes rows to `path` and aggregates to
/// `<stem>.agg.csv`; JSON writes one document with both.
pub fn emit_paths(batch: &PathsBatch, format: OutputFormat, path: &Path) -> Result<Vec<PathBuf>> {
    match format {
        OutputFormat::Csv => {
            let agg = sibling(path, "agg.csv");
            write_file(path, |w| write_csv(&batch.rows, w))?;
            if let Err(e) = write_file(&agg, |w| write_csv(&batch.aggregates, w)) {
                let _ = fs::remove_file(path);
                return Err(e);
            }
            Ok(vec![path.to_path_buf(), agg])
        }
        OutputFormat::Json => {
            write_file(path, |w| write_json(batch, w))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}

pub fn emit_flows(batch: &FlowBatch, format: OutputFormat, path: &Path) -> Result<Vec<PathBuf>> {
    match format {
        OutputFormat::Csv => {
            let agg = sibling(path, "agg.csv");
            write_file(path, |w| write_csv(&batch.rows, w))?;
            if let Err(e) = write_file(&agg, |w| write_csv(&batch.aggregates, w)) {
                let _ = fs::remove_file(path);
                return Err(e);
            }
            Ok(vec![path.to_path_buf(), agg])
        }
        OutputFormat::Json => {
            write_file(path, |w| write_json(batch, w))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}

pub fn emit_condexp(rows: &[CondExpRow], format: OutputFormat, path: &Path) -> Result<Vec<PathBuf>> {
    match format {
        OutputFormat::Csv => write_file(path, |w| write_csv(rows, w))?,
        OutputFormat::Json => write_file(path, |w| write_json(rows, w))?,
    }
    Ok(vec![path.to_path_buf()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_batch_is_header_only() {
        let mut buf = Vec::new();
        write_csv::<PathRow, _>(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "trial,seed,k,exists,x_k,s_k,limit,ratio\n");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn absent_values_are_empty_fields() {
        let row = PathRow { trial: 3, seed: 9, k: 2, exists: false, x_k: None, s_k: None, limit: 0.5, ratio: None };
        let mut buf = Vec::new();
        write_csv(&[row.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.ends_with("3,9,2,0,,,5.0000000000000000e-1,\n"), "{text}");
        assert_eq!(read_paths_csv(&buf[..]).unwrap(), vec![row]);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_paths_csv(&b"a,b\n1,2\n"[..]).is_err());
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let err = emit_condexp(&[], OutputFormat::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("/tmp/run.csv"), "agg.csv"), PathBuf::from("/tmp/run.agg.csv"));
    }
}

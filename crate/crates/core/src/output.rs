//! CSV and JSON rendering of results, and atomic file output.
//!
//! CSV files start with `#` comment lines carrying the provenance as compact
//! JSON, followed by a fixed header row. Numbers are written with 12
//! significant digits; JSON keeps full precision.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::equilibrium::Correlators;
use crate::error::{Error, Result};
use crate::scan::{Axis, RowStatus, ScanMetadata, ScanResult, ScanRow};

/// Significant digits of CSV numbers.
pub const CSV_DIGITS: usize = 12;

/// Observable columns shared by scans and point reports.
pub const OBSERVABLE_COLUMNS: [&str; 7] = ["M_z", "T_xx", "T_yy", "T_zz", "T_xy", "E_N", "energy"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `%.{digits}g`-style rendering: shortest of fixed and scientific, trailing
/// zeros trimmed.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A single CSV/JSON cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Number(v) => format_significant(*v, CSV_DIGITS),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Number(v) if v.is_finite() => Value::from(*v),
            Cell::Number(v) => Value::from(format_significant(*v, CSV_DIGITS)),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Number)
    }
}

/// Metadata plus a rectangular table; the common shape of every output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        write_metadata_comments(&mut out, &self.metadata)?;
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "metadata": self.metadata, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn write_metadata_comments(out: &mut Vec<u8>, metadata: &Value) -> Result<()> {
    writeln!(out, "# metadata: {}", serde_json::to_string(metadata)?)?;
    Ok(())
}

/// Column names of a scan CSV.
pub fn scan_columns(axis: Axis) -> Vec<String> {
    let mut cols = vec![axis.column().to_string()];
    cols.extend(OBSERVABLE_COLUMNS.iter().map(|s| s.to_string()));
    cols.extend(["M_z_eq", "E_N_eq", "status"].iter().map(|s| s.to_string()));
    cols
}

fn status_text(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Ok => "ok",
        RowStatus::NonConverged => "non_converged",
        RowStatus::NonPhysical => "non_physical",
    }
}

fn parse_status(s: &str) -> Result<RowStatus> {
    match s {
        "ok" => Ok(RowStatus::Ok),
        "non_converged" => Ok(RowStatus::NonConverged),
        "non_physical" => Ok(RowStatus::NonPhysical),
        other => Err(Error::Format(format!("unknown row status `{other}`"))),
    }
}

/// Observable cells in [`OBSERVABLE_COLUMNS`] order.
pub fn observable_cells(c: Option<&Correlators>, e_n: Option<f64>, energy: Option<f64>) -> Vec<Cell> {
    let mut cells: Vec<Cell> = match c {
        Some(c) => c.as_array().iter().map(|&v| Cell::Number(v)).collect(),
        None => vec![Cell::Empty; 5],
    };
    cells.push(e_n.into());
    cells.push(energy.into());
    cells
}

pub fn scan_table(scan: &ScanResult) -> Result<Table> {
    let rows = scan
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![Cell::Number(r.axis_value)];
            cells.extend(observable_cells(r.correlators.as_ref(), r.e_n, r.energy));
            cells.push(r.m_z_equilibrium.into());
            cells.push(r.e_n_equilibrium.into());
            cells.push(Cell::Text(status_text(r.status).into()));
            cells
        })
        .collect();
    Ok(Table {
        metadata: serde_json::to_value(&scan.metadata)?,
        columns: scan_columns(scan.axis()),
        rows,
    })
}

/// CSV rendering of a scan.
pub fn scan_to_csv(scan: &ScanResult) -> Result<String> {
    scan_table(scan)?.to_csv()
}

/// Full-precision JSON document `{metadata, rows}`.
pub fn scan_to_json(scan: &ScanResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(scan)? + "\n")
}

pub fn scan_from_json(text: &str) -> Result<ScanResult> {
    Ok(serde_json::from_str(text)?)
}

/// Parses a scan CSV written by [`scan_to_csv`].
pub fn scan_from_csv(text: &str) -> Result<ScanResult> {
    let meta_line = text
        .lines()
        .find_map(|l| l.strip_prefix("# metadata: "))
        .ok_or_else(|| Error::Format("missing `# metadata:` line".into()))?;
    let metadata: ScanMetadata = serde_json::from_str(meta_line)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != scan_columns(metadata.axis) {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Format(format!("bad number `{s}`: {e}")))
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let f: Vec<Option<f64>> = record.iter().take(10).map(num).collect::<Result<_>>()?;
        let correlators = match (f[1], f[2], f[3], f[4], f[5]) {
            (Some(m_z), Some(t_xx), Some(t_yy), Some(t_zz), Some(t_xy)) => Some(Correlators {
                m_z,
                t_xx,
                t_yy,
                t_zz,
                t_xy,
            }),
            _ => None,
        };
        rows.push(ScanRow {
            axis_value: f[0].ok_or_else(|| Error::Format("missing axis value".into()))?,
            correlators,
            e_n: f[6],
            energy: f[7],
            m_z_equilibrium: f[8],
            e_n_equilibrium: f[9],
            status: parse_status(record.get(10).unwrap_or(""))?,
        });
    }
    Ok(ScanResult { metadata, rows })
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::env::current_dir()?,
    };
    fs::create_dir_all(&dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("`{}` is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Beta, ModelParams, QuadratureSpec};
    use crate::scan::time_series;
    use proptest::prelude::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.148328458546948, 12), "0.148328458547");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(-2.5e-9, 12), "-2.5e-9");
        assert_eq!(format_significant(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(f64::INFINITY, 12), "inf");
        assert_eq!(format_significant(10.0, 12), "10");
    }

    proptest! {
        #[test]
        fn twelve_digit_round_trip(v in -1e6f64..1e6) {
            let back: f64 = format_significant(v, 12).parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-11 * v.abs().max(1e-300));
        }
    }

    fn sample() -> ScanResult {
        let p = ModelParams::new(0.5, 0.5, 0.0, Beta::Finite(200.0)).unwrap();
        time_series(&p, &[0.0, 0.7, 1.9], &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = sample();
        let back = scan_from_json(&scan_to_json(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let v: Value = serde_json::from_str(&scan_to_json(&s).unwrap()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["metadata", "rows"]);
    }

    #[test]
    fn csv_round_trip_to_twelve_digits() {
        let s = sample();
        let text = scan_to_csv(&s).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("t,M_z,T_xx,T_yy,T_zz,T_xy,E_N,energy,M_z_eq,E_N_eq,status"));
        let back = scan_from_csv(&text).unwrap();
        assert_eq!(back.metadata, s.metadata);
        assert_eq!(back.rows.len(), s.rows.len());
        for (a, b) in back.rows.iter().zip(&s.rows) {
            let (ca, cb) = (a.correlators.unwrap(), b.correlators.unwrap());
            for (x, y) in ca.as_array().iter().zip(cb.as_array().iter()) {
                assert!((x - y).abs() <= 1e-11 * y.abs().max(1e-12));
            }
            assert_eq!(a.status, b.status);
        }
        // re-rendering the parsed CSV reproduces it byte for byte
        assert_eq!(scan_to_csv(&back).unwrap(), text);
    }

    #[test]
    fn csv_quotes_and_line_endings() {
        let t = Table {
            metadata: serde_json::json!({"k": 1}),
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Cell::Text("x,y".into()), Cell::Empty]],
        };
        let s = t.to_csv().unwrap();
        assert_eq!(s, "# metadata: {\"k\":1}\na,b\n\"x,y\",\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("out.csv");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        let leftovers: Vec<_> = fs::read_dir(path.parent().unwrap()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}

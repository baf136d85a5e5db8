//! Trace records and deterministic, atomically written CSV files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

/// Trace columns, in file order.
pub const TRACE_COLUMNS: [&str; 9] = [
    "iter",
    "p_x",
    "grad_p_norm",
    "metric_ci",
    "m_x_norm",
    "m_y_norm",
    "clipped_x",
    "clipped_y",
    "wall_ns",
];

/// Diagnostics of one iteration, taken at the iterate the step started from.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    /// `P(x_i)`, present on `eval_every` multiples.
    pub p_x: Option<f64>,
    /// `||grad P(x_i)||` on problems with a closed-form inner maximizer.
    pub grad_p_norm: Option<f64>,
    pub metric_ci: Option<f64>,
    pub m_x_norm: f64,
    pub m_y_norm: f64,
    pub clipped_x: bool,
    pub clipped_y: bool,
    pub wall_ns: Option<u64>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl TraceRecord {
    fn fields(&self) -> [String; 9] {
        [
            self.iter.to_string(),
            opt(self.p_x),
            opt(self.grad_p_norm),
            opt(self.metric_ci),
            self.m_x_norm.to_string(),
            self.m_y_norm.to_string(),
            self.clipped_x.to_string(),
            self.clipped_y.to_string(),
            opt(self.wall_ns),
        ]
    }
}

/// Writes `path` through a temporary file in the same directory and renames
/// it into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Renders rows as CSV with a header and LF line endings.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for row in rows {
        w.write_record(row).expect("in-memory CSV write");
    }
    w.into_inner().expect("in-memory CSV flush")
}

pub fn trace_bytes(records: &[TraceRecord]) -> Vec<u8> {
    csv_bytes(&TRACE_COLUMNS, records.iter().map(TraceRecord::fields))
}

pub fn write_trace(path: &Path, records: &[TraceRecord]) -> Result<()> {
    write_atomic(path, &trace_bytes(records))
}

pub fn trace_file_name(optimizer: &str, seed: u64) -> String {
    format!("trace_{optimizer}_seed{seed}.csv")
}

/// Splits `trace_<optimizer>_seed<k>.csv` into its parts.
pub fn parse_trace_file_name(name: &str) -> Option<(String, u64)> {
    let stem = name.strip_prefix("trace_")?.strip_suffix(".csv")?;
    let (opt, seed) = stem.rsplit_once("_seed")?;
    Some((opt.to_string(), seed.parse().ok()?))
}

/// A CSV file read into its header and raw string rows.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<CsvTable> {
        let csv_err = |source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(csv_err)?;
        let header = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(str::to_string).collect());
        }
        Ok(CsvTable {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::MissingColumn {
                path: self.path.clone(),
                column: name.to_string(),
            })
    }

    fn bad(&self, row: usize, message: String) -> HarnessError {
        // header is line 1
        HarnessError::BadTrace {
            path: self.path.clone(),
            line: row as u64 + 2,
            message,
        }
    }

    /// Optional float in `column` of `row`; empty fields are `None`.
    pub fn opt_f64(&self, row: usize, column: usize) -> Result<Option<f64>> {
        let s = &self.rows[row][column];
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).map_err(|_| {
            self.bad(
                row,
                format!(
                    "`{}` is not a number in column `{}`",
                    s, self.header[column]
                ),
            )
        })
    }

    pub fn usize(&self, row: usize, column: usize) -> Result<usize> {
        let s = &self.rows[row][column];
        s.parse().map_err(|_| {
            self.bad(
                row,
                format!(
                    "`{}` is not an integer in column `{}`",
                    s, self.header[column]
                ),
            )
        })
    }
}

/// Reads a trace file back, checking the column order.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let table = CsvTable::read(path)?;
    for (k, name) in TRACE_COLUMNS.iter().enumerate() {
        if table.header.get(k).map(String::as_str) != Some(*name) {
            return Err(HarnessError::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            });
        }
    }
    let boolean = |row: usize, col: usize| -> Result<bool> {
        match table.rows[row][col].as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(table.bad(row, format!("`{other}` is not a boolean"))),
        }
    };
    (0..table.rows.len())
        .map(|i| {
            Ok(TraceRecord {
                iter: table.usize(i, 0)?,
                p_x: table.opt_f64(i, 1)?,
                grad_p_norm: table.opt_f64(i, 2)?,
                metric_ci: table.opt_f64(i, 3)?,
                m_x_norm: table
                    .opt_f64(i, 4)?
                    .ok_or_else(|| table.bad(i, "empty m_x_norm".into()))?,
                m_y_norm: table
                    .opt_f64(i, 5)?
                    .ok_or_else(|| table.bad(i, "empty m_y_norm".into()))?,
                clipped_x: boolean(i, 6)?,
                clipped_y: boolean(i, 7)?,
                wall_ns: table.opt_f64(i, 8)?.map(|v| v as u64),
            })
        })
        .collect()
}

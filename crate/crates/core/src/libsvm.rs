//! LIBSVM sparse text format: `<label> <index>:<value> ...`.
//!
//! Indices are 1-based and strictly increasing in the file and stored 0-based.
//! Everything after `#` on a line is a comment. Files ending in `.gz` are
//! decompressed transparently.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("missing label")]
    MissingLabel,
    #[error("unparseable label `{0}`")]
    BadLabel(String),
    #[error("malformed feature token `{0}` (expected index:value)")]
    MalformedToken(String),
    #[error("unparseable feature index `{0}`")]
    BadIndex(String),
    #[error("feature index must be >= 1")]
    IndexBelowOne,
    #[error("non-increasing feature index {got} after {prev}")]
    NonIncreasingIndex { prev: usize, got: usize },
    #[error("unparseable feature value `{0}`")]
    BadValue(String),
}

/// Parse failure located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// One parsed data line. Feature indices are 1-based as in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLine {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

/// Parses a single data line, reporting errors as line 1.
pub fn parse_line(line: &str) -> Result<ParsedLine, ParseError> {
    parse_line_at(line, 1)
}

/// Yields `(byte_offset, token)` for whitespace-separated tokens.
fn tokens(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.split_ascii_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - s.as_ptr() as usize, tok))
}

/// Parses a data line; `line_no` is used for error locations.
pub fn parse_line_at(line: &str, line_no: usize) -> Result<ParsedLine, ParseError> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let err = |offset: usize, kind| ParseError {
        line: line_no,
        column: offset + 1,
        kind,
    };

    let mut toks = tokens(content);
    let (off, label_tok) = toks
        .next()
        .ok_or_else(|| err(0, ParseErrorKind::MissingLabel))?;
    let label: f64 = label_tok
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| err(off, ParseErrorKind::BadLabel(label_tok.to_string())))?;

    let mut features = Vec::new();
    let mut prev = 0usize;
    for (off, tok) in toks {
        let (idx_s, val_s) = tok
            .split_once(':')
            .ok_or_else(|| err(off, ParseErrorKind::MalformedToken(tok.to_string())))?;
        let idx: usize = idx_s
            .parse()
            .map_err(|_| err(off, ParseErrorKind::BadIndex(idx_s.to_string())))?;
        if idx < 1 {
            return Err(err(off, ParseErrorKind::IndexBelowOne));
        }
        if idx <= prev {
            return Err(err(
                off,
                ParseErrorKind::NonIncreasingIndex { prev, got: idx },
            ));
        }
        let val_off = off + idx_s.len() + 1;
        let val: f64 = val_s
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(val_off, ParseErrorKind::BadValue(val_s.to_string())))?;
        features.push((idx, val));
        prev = idx;
    }
    Ok(ParsedLine { label, features })
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(
        "{path}: dimension override {requested} is below the largest feature index {observed}"
    )]
    DimensionOverride {
        path: PathBuf,
        requested: usize,
        observed: usize,
    },
    #[error("{path}: subsample of {requested} rows requested but the file has {available}")]
    SubsampleTooLarge {
        path: PathBuf,
        requested: usize,
        available: usize,
    },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadOptions {
    /// Map labels `<= 0` to `-1` and `> 0` to `+1`.
    pub binarize_labels: bool,
    /// Keep this many rows, chosen by a seeded shuffle.
    pub subsample: Option<usize>,
    pub seed: u64,
    /// Preserve class proportions when subsampling.
    pub stratify: bool,
    /// Feature dimension override; must cover every observed index.
    pub dim: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            binarize_labels: true,
            subsample: None,
            seed: 0,
            stratify: false,
            dim: None,
        }
    }
}

/// Sparse labelled dataset in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    labels: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from rows of 0-based `(index, value)` pairs.
    ///
    /// Panics if a row's indices are not strictly increasing or exceed `d`.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>, d: usize) -> Self {
        assert_eq!(rows.len(), labels.len(), "row count must equal label count");
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            for w in row.windows(2) {
                assert!(w[0].0 < w[1].0, "indices must be strictly increasing");
            }
            for (j, v) in row {
                assert!(j < d, "index {j} out of range for dimension {d}");
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Dataset {
            d,
            indptr,
            indices,
            values,
            labels,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// 0-based indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    /// Keeps the rows at `keep` (ascending).
    fn select(&self, keep: &[usize]) -> Dataset {
        let rows = keep
            .iter()
            .map(|&i| {
                let (idx, val) = self.row(i);
                idx.iter().copied().zip(val.iter().copied()).collect()
            })
            .collect();
        let labels = keep.iter().map(|&i| self.labels[i]).collect();
        Dataset::from_rows(rows, labels, self.d)
    }

    /// `k` rows chosen by a seeded shuffle, kept in file order; `None` when
    /// `k` exceeds `n`. With `stratify` every class keeps its share of rows
    /// to within one.
    pub fn subsample(&self, k: usize, seed: u64, stratify: bool) -> Option<Dataset> {
        (k <= self.n()).then(|| self.select(&subsample_indices(&self.labels, k, seed, stratify)))
    }

    /// Writes the dataset back in LIBSVM text form.
    pub fn write_libsvm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n() {
            write!(w, "{}", self.labels[i])?;
            let (idx, val) = self.row(i);
            for (j, v) in idx.iter().zip(val) {
                write!(w, " {}:{}", j + 1, v)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_libsvm_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_libsvm(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("LIBSVM output is ASCII")
    }
}

/// Loads a LIBSVM file (gzip-compressed if the name ends in `.gz`).
pub fn load_dataset(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset, LoadError> {
    let path = path.as_ref();
    let io_err = |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(flate2::read::GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    read_dataset(BufReader::new(reader), path, options)
}

/// Parses a dataset from any buffered reader; `source` labels errors.
pub fn read_dataset<R: BufRead>(
    reader: R,
    source: &Path,
    options: &LoadOptions,
) -> Result<Dataset, LoadError> {
    let path = source.to_path_buf();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    let mut relabelled = 0usize;

    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| LoadError::Io {
            path: path.clone(),
            source,
        })?;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed = parse_line_at(&line, k + 1).map_err(|source| LoadError::Parse {
            path: path.clone(),
            source,
        })?;
        let label = if options.binarize_labels {
            let b = if parsed.label > 0.0 { 1.0 } else { -1.0 };
            if b != parsed.label {
                relabelled += 1;
            }
            b
        } else {
            parsed.label
        };
        if let Some(&(last, _)) = parsed.features.last() {
            max_index = max_index.max(last);
        }
        rows.push(
            parsed
                .features
                .into_iter()
                .map(|(j, v)| (j - 1, v))
                .collect::<Vec<_>>(),
        );
        labels.push(label);
    }
    if relabelled > 0 {
        log::info!(
            "{}: binarized {relabelled} labels to {{-1, +1}}",
            path.display()
        );
    }
    if rows.is_empty() {
        return Err(LoadError::Empty { path });
    }

    let d = match options.dim {
        Some(requested) if requested < max_index => {
            return Err(LoadError::DimensionOverride {
                path,
                requested,
                observed: max_index,
            })
        }
        Some(requested) => requested,
        None => max_index,
    };
    let full = Dataset::from_rows(rows, labels, d);

    match options.subsample {
        None => Ok(full),
        Some(k) if k > full.n() => Err(LoadError::SubsampleTooLarge {
            path,
            requested: k,
            available: full.n(),
        }),
        Some(k) => Ok(full
            .subsample(k, options.seed, options.stratify)
            .expect("k checked against n")),
    }
}

/// Seeded choice of `k` row indices, returned ascending.
fn subsample_indices(labels: &[f64], k: usize, seed: u64, stratify: bool) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = if stratify {
        let mut classes: Vec<f64> = labels.to_vec();
        classes.sort_by(f64::total_cmp);
        classes.dedup();
        let groups: Vec<Vec<usize>> = classes
            .iter()
            .map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect();
        let quotas = largest_remainder_quotas(&groups.iter().map(Vec::len).collect::<Vec<_>>(), k);
        let mut keep = Vec::with_capacity(k);
        for (mut group, quota) in groups.into_iter().zip(quotas) {
            group.shuffle(&mut rng);
            keep.extend_from_slice(&group[..quota]);
        }
        keep
    } else {
        let mut all: Vec<usize> = (0..labels.len()).collect();
        all.shuffle(&mut rng);
        all.truncate(k);
        all
    };
    keep.sort_unstable();
    keep
}

/// Splits `k` across groups proportionally to their sizes (Hamilton method).
fn largest_remainder_quotas(sizes: &[usize], k: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    let exact: Vec<f64> = sizes
        .iter()
        .map(|&s| s as f64 * k as f64 / total as f64)
        .collect();
    let mut quotas: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    let mut missing = k - quotas.iter().sum::<usize>();
    for &g in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        if quotas[g] < sizes[g] {
            quotas[g] += 1;
            missing -= 1;
        }
    }
    quotas
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let p = parse_line("+1 2:0.5 7:-1.25").unwrap();
        assert_eq!(
            p,
            ParsedLine {
                label: 1.0,
                features: vec![(2, 0.5), (7, -1.25)]
            }
        );
        let p = parse_line("-1").unwrap();
        assert_eq!(
            p,
            ParsedLine {
                label: -1.0,
                features: vec![]
            }
        );
        let e = parse_line("1 3:1 2:1").unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::NonIncreasingIndex { prev: 3, got: 2 }
        );
        assert_eq!(e.column, 7);
    }

    #[test]
    fn comments_and_trailing_whitespace() {
        let p = parse_line("0 1:1 4:2   # note 5:x").unwrap();
        assert_eq!(p.features, vec![(1, 1.0), (4, 2.0)]);
        let p = parse_line("1 1:3\t\r").unwrap();
        assert_eq!(p.features, vec![(1, 3.0)]);
    }

    #[test]
    fn located_errors() {
        let e = parse_line_at("1 0:1", 4).unwrap_err();
        assert_eq!(
            (e.line, e.column, e.kind),
            (4, 3, ParseErrorKind::IndexBelowOne)
        );
        let e = parse_line("1 2:abc").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(matches!(e.kind, ParseErrorKind::BadValue(_)));
        let e = parse_line("1 2-1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MalformedToken(_)));
        let e = parse_line("x 1:1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadLabel(_)));
        let e = parse_line("   ").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingLabel);
        let e = parse_line("1 q:1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadIndex(_)));
        assert!(e.to_string().starts_with("line 1, column 3"));
    }

    fn read(text: &str, options: &LoadOptions) -> Result<Dataset, LoadError> {
        read_dataset(text.as_bytes(), Path::new("mem.txt"), options)
    }

    #[test]
    fn read_binarizes_and_infers_dim() {
        let ds = read("0 1:1\n# comment\n\n2 3:0.5 5:1\n", &LoadOptions::default()).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.d(), 5);
        assert_eq!(ds.labels(), &[-1.0, 1.0]);
        assert_eq!(ds.row(1), (&[2usize, 4][..], &[0.5, 1.0][..]));
    }

    #[test]
    fn dimension_override() {
        let text = "1 3:1\n";
        let ok = read(
            text,
            &LoadOptions {
                dim: Some(10),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ok.d(), 10);
        let err = read(
            text,
            &LoadOptions {
                dim: Some(2),
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            LoadError::DimensionOverride {
                requested: 2,
                observed: 3,
                ..
            }
        ));
    }

    #[test]
    fn parse_error_carries_file_line() {
        let err = read("1 1:1\n1 2:1 1:1\n", &LoadOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("mem.txt: line 2, column 7"), "{msg}");
    }

    #[test]
    fn quotas_sum_to_k() {
        assert_eq!(largest_remainder_quotas(&[2, 8], 5), vec![1, 4]);
        assert_eq!(
            largest_remainder_quotas(&[5, 5], 5).iter().sum::<usize>(),
            5
        );
        assert_eq!(largest_remainder_quotas(&[1, 99], 100), vec![1, 99]);
    }
}

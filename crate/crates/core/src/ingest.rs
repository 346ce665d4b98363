//! Run manifests and the matrix interchange formats.
//!
//! A run is described by a JSON manifest listing the classes (with optional
//! WordNet synset ids) and, per epoch, paths to the exported artifacts:
//!
//! ```json
//! {
//!   "run_id": "resnet18-mini",
//!   "classes": [{"index": 0, "name": "dog", "synset_id": "n02084071"}],
//!   "epochs": [{"epoch": 0, "weights": "e0/w.f32", "confusion": "e0/cm.csv", "templates": null}]
//! }
//! ```
//!
//! Matrices are either CSV (no header, one matrix row per line) or raw
//! row-major little-endian `f32` (`.f32`). Paths resolve relative to the
//! manifest's directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub index: usize,
    pub name: String,
    #[serde(default)]
    pub synset_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochEntry {
    pub epoch: u64,
    pub weights_path: Option<PathBuf>,
    pub confusion_path: Option<PathBuf>,
    pub templates_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub run_id: String,
    /// Sorted by index; `classes[i].index == i`.
    pub classes: Vec<ClassSpec>,
    pub epochs: Vec<EpochEntry>,
    pub source: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    run_id: String,
    classes: Vec<ClassSpec>,
    epochs: Vec<EpochFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EpochFile {
    epoch: u64,
    #[serde(default)]
    weights: Option<String>,
    #[serde(default)]
    confusion: Option<String>,
    #[serde(default)]
    templates: Option<String>,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<RunManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: ManifestFile = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let invalid = |field: String, message: String| Error::Manifest {
        path: path.to_path_buf(),
        field,
        message,
    };

    if raw.classes.is_empty() {
        return Err(invalid("classes".into(), "no classes declared".into()));
    }
    let n = raw.classes.len();
    let mut slots: Vec<Option<ClassSpec>> = vec![None; n];
    for (pos, class) in raw.classes.into_iter().enumerate() {
        let field = format!("classes[{pos}].index");
        if class.index >= n {
            return Err(invalid(
                field,
                format!("class index {} out of range 0..{n}", class.index),
            ));
        }
        let index = class.index;
        if slots[index].is_some() {
            return Err(invalid(field, format!("duplicate class index {index}")));
        }
        slots[index] = Some(class);
    }
    // n slots filled by n distinct in-range indices, so none is empty.
    let classes: Vec<ClassSpec> = slots.into_iter().flatten().collect();

    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |p: Option<String>| p.map(|p| base.join(p));
    let mut epochs = Vec::with_capacity(raw.epochs.len());
    for (pos, e) in raw.epochs.into_iter().enumerate() {
        if let Some(prev) = epochs.last().map(|p: &EpochEntry| p.epoch) {
            if e.epoch <= prev {
                return Err(invalid(
                    format!("epochs[{pos}].epoch"),
                    format!(
                        "epoch {} does not increase on previous epoch {prev}",
                        e.epoch
                    ),
                ));
            }
        }
        if e.weights.is_none() && e.confusion.is_none() && e.templates.is_none() {
            return Err(invalid(
                format!("epochs[{pos}]"),
                format!("epoch {} lists no artifacts", e.epoch),
            ));
        }
        epochs.push(EpochEntry {
            epoch: e.epoch,
            weights_path: resolve(e.weights),
            confusion_path: resolve(e.confusion),
            templates_path: resolve(e.templates),
        });
    }

    Ok(RunManifest {
        run_id: raw.run_id,
        classes,
        epochs,
        source: path.to_path_buf(),
    })
}

impl RunManifest {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Classes lacking a synset id, formatted `index (name)`.
    pub fn classes_without_synset(&self) -> Vec<String> {
        self.classes
            .iter()
            .filter(|c| c.synset_id.is_none())
            .map(|c| format!("{} ({})", c.index, c.name))
            .collect()
    }

    pub fn epoch(&self, epoch: u64) -> Option<&EpochEntry> {
        self.epochs.iter().find(|e| e.epoch == epoch)
    }

    /// Loads the N×D classifier weights, if the epoch lists them.
    pub fn load_weights<T: Real>(&self, entry: &EpochEntry) -> Result<Option<DenseMatrix<T>>> {
        self.load_artifact(entry, entry.weights_path.as_deref(), "weights", None)
    }

    /// Loads the N×N confusion counts, if the epoch lists them.
    pub fn load_confusion<T: Real>(&self, entry: &EpochEntry) -> Result<Option<DenseMatrix<T>>> {
        let n = self.n_classes();
        self.load_artifact(entry, entry.confusion_path.as_deref(), "confusion", Some(n))
    }

    pub fn load_templates<T: Real>(&self, entry: &EpochEntry) -> Result<Option<DenseMatrix<T>>> {
        self.load_artifact(entry, entry.templates_path.as_deref(), "templates", None)
    }

    fn load_artifact<T: Real>(
        &self,
        entry: &EpochEntry,
        path: Option<&Path>,
        what: &str,
        expect_cols: Option<usize>,
    ) -> Result<Option<DenseMatrix<T>>> {
        let Some(path) = path else {
            return Ok(None);
        };
        let n = self.n_classes();
        let m = load_matrix(path, Some(n), expect_cols).map_err(|e| match e {
            Error::MatrixFile { path, message } if message.starts_with("dimension mismatch") => {
                Error::MatrixFile {
                    path,
                    message: format!("{what} matrix for {} classes: {message}", n),
                }
            }
            other => other,
        });
        m.map(Some).map_err(|e| e.in_epoch(entry.epoch))
    }
}

/// Loads a matrix, choosing the format by extension (`.csv` or `.f32`).
///
/// For `.f32` files the row count must be known; the column count is
/// inferred from the file size when not given.
pub fn load_matrix<T: Real>(
    path: impl AsRef<Path>,
    expect_rows: Option<usize>,
    expect_cols: Option<usize>,
) -> Result<DenseMatrix<T>> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => load_matrix_csv(path, expect_rows, expect_cols),
        Some("f32") => {
            let rows = expect_rows.ok_or_else(|| {
                Error::matrix_file(path, "row count required to read a .f32 matrix")
            })?;
            match expect_cols {
                Some(cols) => load_matrix_binary(path, rows, cols),
                None => {
                    let len = fs::metadata(path).map_err(|e| Error::io(path, e))?.len() as usize;
                    if rows == 0 || !len.is_multiple_of(rows * 4) {
                        return Err(Error::matrix_file(
                            path,
                            format!(
                                "dimension mismatch: {len} bytes is not a whole number of {rows}-row f32 matrix columns"
                            ),
                        ));
                    }
                    load_matrix_binary(path, rows, len / (rows * 4))
                }
            }
        }
        _ => Err(Error::matrix_file(
            path,
            "unknown matrix format (expected .csv or .f32 extension)",
        )),
    }
}

pub fn load_matrix_csv<T: Real>(
    path: impl AsRef<Path>,
    expect_rows: Option<usize>,
    expect_cols: Option<usize>,
) -> Result<DenseMatrix<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes.as_slice());

    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::matrix_file(path, format!("row {}: {e}", r + 1)))?;
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::matrix_file(path, format!("ragged row {}", r + 1)));
            }
            _ => {}
        }
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| {
                Error::matrix_file(
                    path,
                    format!("non-numeric cell {cell:?} at row {}, col {}", r + 1, c + 1),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::matrix_file(
                    path,
                    format!("non-finite value at row {}, col {}", r + 1, c + 1),
                ));
            }
            values.push(T::lit(v));
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    check_dims(path, rows, cols, expect_rows, expect_cols)?;
    DenseMatrix::new(rows, cols, values)
}

pub fn load_matrix_binary<T: Real>(
    path: impl AsRef<Path>,
    rows: usize,
    cols: usize,
) -> Result<DenseMatrix<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let expected = rows * cols * 4;
    if bytes.len() != expected {
        return Err(Error::matrix_file(
            path,
            format!("expected {expected} bytes, found {}", bytes.len()),
        ));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for (k, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        if !v.is_finite() {
            return Err(Error::matrix_file(
                path,
                format!(
                    "non-finite value at row {}, col {}",
                    k / cols + 1,
                    k % cols + 1
                ),
            ));
        }
        values.push(T::from_f32(v).expect("finite f32"));
    }
    DenseMatrix::new(rows, cols, values)
}

fn check_dims(
    path: &Path,
    rows: usize,
    cols: usize,
    expect_rows: Option<usize>,
    expect_cols: Option<usize>,
) -> Result<()> {
    let bad_rows = expect_rows.is_some_and(|r| r != rows);
    let bad_cols = expect_cols.is_some_and(|c| c != cols);
    if bad_rows || bad_cols {
        let want = |e: Option<usize>| e.map_or("*".to_string(), |v| v.to_string());
        return Err(Error::matrix_file(
            path,
            format!(
                "dimension mismatch: found {rows}x{cols}, expected {}x{}",
                want(expect_rows),
                want(expect_cols)
            ),
        ));
    }
    Ok(())
}

/// Formats a value with 9 significant digits, in the shortest form that
/// reads back to the rounded value.
pub fn format_sig9(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub fn write_matrix_csv<T: Real>(m: &DenseMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(m.rows() * m.cols() * 12);
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_sig9(v.as_f64()));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes the matrix as row-major little-endian `f32`, narrowing if needed.
pub fn write_matrix_binary<T: Real>(m: &DenseMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::with_capacity(m.values().len() * 4);
    for v in m.values() {
        buf.extend_from_slice(&v.to_f32().expect("finite").to_le_bytes());
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

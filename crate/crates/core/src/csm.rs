//! Class similarity matrices: construction from weights, templates and
//! confusion counts, off-diagonal min-max scaling, and per-row sorting.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{load_matrix, write_matrix_binary, write_matrix_csv};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsmKind {
    Network,
    Confusion,
    Semantic,
    Template,
}

impl CsmKind {
    /// Value range of a raw matrix of this kind.
    pub fn raw_range(self) -> (f64, f64) {
        match self {
            CsmKind::Network | CsmKind::Template => (-1.0, 1.0),
            CsmKind::Confusion | CsmKind::Semantic => (0.0, 1.0),
        }
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            CsmKind::Network => "NCSM",
            CsmKind::Confusion => "CCSM",
            CsmKind::Semantic => "SCSM",
            CsmKind::Template => "TNCSM",
        }
    }
}

/// N×N pairwise class similarities with a unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSimilarityMatrix<T> {
    kind: CsmKind,
    symmetric: bool,
    values: DenseMatrix<T>,
}

impl<T: Real> ClassSimilarityMatrix<T> {
    /// Validates and wraps a matrix: square, unit diagonal, entries in the
    /// kind's range, and symmetric when flagged so.
    pub fn from_parts(kind: CsmKind, symmetric: bool, values: DenseMatrix<T>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::Shape(format!(
                "similarity matrix must be square, got {}x{}",
                values.rows(),
                values.cols()
            )));
        }
        let n = values.rows();
        let (lo, hi) = kind.raw_range();
        for i in 0..n {
            if values.get(i, i) != T::one() {
                return Err(Error::Domain(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = values.get(i, j).as_f64();
                if v < lo || v > hi {
                    return Err(Error::Domain(format!(
                        "entry ({i},{j}) = {v} outside [{lo}, {hi}] for {:?}",
                        kind
                    )));
                }
                if symmetric && (v - values.get(j, i).as_f64()).abs() > SYMMETRY_TOL {
                    return Err(Error::Domain(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        Ok(Self::from_trusted(kind, symmetric, values))
    }

    pub(crate) fn from_trusted(kind: CsmKind, symmetric: bool, values: DenseMatrix<T>) -> Self {
        Self {
            kind,
            symmetric,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn kind(&self) -> CsmKind {
        self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values.get(i, j)
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.values.row(i)
    }

    /// Off-diagonal entries in row-major order, both triangles.
    pub fn off_diagonal(&self) -> Vec<T> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(self.values.get(i, j));
                }
            }
        }
        out
    }

    /// Same matrix with rows and columns reordered: entry (i,j) of the
    /// result is entry (perm[i], perm[j]) of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Domain(
                "not a permutation of the class indices".into(),
            ));
        }
        let values = DenseMatrix::from_fn(n, n, |i, j| self.values.get(perm[i], perm[j]));
        Ok(Self::from_trusted(self.kind, self.symmetric, values))
    }
}

/// Network CSM: cosine similarity between classifier weight rows.
pub fn ncsm_from_weights<T: Real>(weights: &DenseMatrix<T>) -> Result<ClassSimilarityMatrix<T>> {
    cosine_csm(weights, CsmKind::Network)
}

/// Template CSM: cosine similarity between per-class mean feature vectors.
pub fn tncsm_from_templates<T: Real>(
    templates: &DenseMatrix<T>,
) -> Result<ClassSimilarityMatrix<T>> {
    cosine_csm(templates, CsmKind::Template)
}

fn cosine_csm<T: Real>(rows: &DenseMatrix<T>, kind: CsmKind) -> Result<ClassSimilarityMatrix<T>> {
    let n = rows.rows();
    if n < 2 {
        return Err(Error::Domain(format!(
            "{} needs at least 2 classes, got {n}",
            kind.abbreviation()
        )));
    }
    if let Some(pos) = rows.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / rows.cols(),
            col: pos % rows.cols(),
        });
    }
    let norms = (0..n)
        .map(|i| {
            let norm = rows.row(i).iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm > T::zero() {
                Ok(norm)
            } else {
                Err(Error::ZeroNorm(i))
            }
        })
        .collect::<Result<Vec<T>>>()?;

    let mut m = DenseMatrix::identity(n);
    for i in 0..n {
        let wi = rows.row(i);
        for j in i + 1..n {
            let dot: T = wi.iter().zip(rows.row(j)).map(|(&a, &b)| a * b).sum();
            let cos = (dot / (norms[i] * norms[j])).max(-T::one()).min(T::one());
            m.set(i, j, cos);
            m.set(j, i, cos);
        }
    }
    Ok(ClassSimilarityMatrix::from_trusted(kind, true, m))
}

/// Confusion CSM: row-normalized counts with the diagonal overwritten by 1.
///
/// A row with no samples becomes all zeros before the diagonal is set; use
/// [`empty_confusion_rows`] to report those.
pub fn ccsm_from_confusion<T: Real>(cm: &DenseMatrix<T>) -> Result<ClassSimilarityMatrix<T>> {
    check_counts(cm)?;
    let n = cm.rows();
    let mut m = DenseMatrix::identity(n);
    for i in 0..n {
        let total: T = cm.row(i).iter().copied().sum();
        if total == T::zero() {
            continue;
        }
        for j in 0..n {
            if i != j {
                m.set(i, j, cm.get(i, j) / total);
            }
        }
    }
    Ok(ClassSimilarityMatrix::from_trusted(
        CsmKind::Confusion,
        false,
        m,
    ))
}

/// Indices of classes whose confusion row has no samples.
pub fn empty_confusion_rows<T: Real>(cm: &DenseMatrix<T>) -> Vec<usize> {
    (0..cm.rows())
        .filter(|&i| cm.row(i).iter().all(|&v| v == T::zero()))
        .collect()
}

pub(crate) fn check_counts<T: Real>(cm: &DenseMatrix<T>) -> Result<()> {
    if !cm.is_square() {
        return Err(Error::Shape(format!(
            "confusion matrix must be square, got {}x{}",
            cm.rows(),
            cm.cols()
        )));
    }
    for i in 0..cm.rows() {
        for j in 0..cm.cols() {
            if cm.get(i, j) < T::zero() {
                return Err(Error::NegativeCount { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Min-max scales the off-diagonal entries jointly onto [0, 1] and sets the
/// diagonal to 1. When every off-diagonal entry is equal they all map to 0.5.
pub fn normalized_offdiag<T: Real>(m: &ClassSimilarityMatrix<T>) -> ClassSimilarityMatrix<T> {
    let n = m.n();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = m.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    let half = T::lit(0.5);
    let span = hi - lo;
    let values = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            T::one()
        } else if span > T::zero() {
            ((m.get(i, j) - lo) / span).max(T::zero()).min(T::one())
        } else {
            half
        }
    });
    ClassSimilarityMatrix::from_trusted(m.kind, m.symmetric, values)
}

/// Per-row class orderings by descending similarity.
///
/// Each class is ranked first in its own row; remaining ties are broken by
/// ascending class index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedCsm {
    n: usize,
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl SortedCsm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Classes ordered from most to least similar to class `i`.
    pub fn order(&self, i: usize) -> &[usize] {
        &self.order[i * self.n..(i + 1) * self.n]
    }

    /// Position of class `j` in row `i` of the ordering.
    #[inline]
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.rank[i * self.n + j]
    }
}

pub fn sorted_csm<T: Real>(m: &ClassSimilarityMatrix<T>) -> SortedCsm {
    let n = m.n();
    let mut order = Vec::with_capacity(n * n);
    let mut rank = vec![0; n * n];
    let mut row: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        row.clear();
        row.extend((0..n).filter(|&j| j != i));
        row.sort_by(|&a, &b| {
            m.get(i, b)
                .partial_cmp(&m.get(i, a))
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        order.push(i);
        order.extend_from_slice(&row);
        for (r, &j) in order[i * n..].iter().enumerate() {
            rank[i * n + j] = r;
        }
    }
    SortedCsm { n, order, rank }
}

/// Metadata written next to a serialized CSM.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsmSidecar {
    pub kind: CsmKind,
    pub n: usize,
    pub symmetric: bool,
}

pub fn sidecar_path(matrix_path: &Path) -> PathBuf {
    matrix_path.with_extension("json")
}

/// Writes the matrix (`.csv` or `.f32`, by extension) plus its JSON sidecar.
pub fn write_csm<T: Real>(m: &ClassSimilarityMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("f32") => write_matrix_binary(m.matrix(), path)?,
        _ => write_matrix_csv(m.matrix(), path)?,
    }
    let sidecar = CsmSidecar {
        kind: m.kind(),
        n: m.n(),
        symmetric: m.is_symmetric(),
    };
    let side = sidecar_path(path);
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    fs::write(&side, text).map_err(|e| Error::io(&side, e))
}

pub fn read_csm<T: Real>(path: impl AsRef<Path>) -> Result<ClassSimilarityMatrix<T>> {
    let path = path.as_ref();
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let sidecar: CsmSidecar = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: side.clone(),
        source,
    })?;
    let values: DenseMatrix<T> = load_matrix(path, Some(sidecar.n), Some(sidecar.n))?;
    // f32 storage and 9-digit CSV both perturb symmetry and the diagonal
    // slightly; restore the exact structure the sidecar declares.
    let n = sidecar.n;
    let (lo, hi) = sidecar.kind.raw_range();
    let values = DenseMatrix::from_fn(n, n, |i, j| -> T {
        if i == j {
            return T::one();
        }
        let v = if sidecar.symmetric && j < i {
            values.get(j, i)
        } else {
            values.get(i, j)
        };
        v.max(T::lit(lo)).min(T::lit(hi))
    });
    ClassSimilarityMatrix::from_parts(sidecar.kind, sidecar.symmetric, values).map_err(|e| {
        Error::MatrixFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    })
}

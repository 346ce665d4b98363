use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ssim::ssim_matrix;
use crate::csm::{normalized_offdiag, ClassSimilarityMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How two normalized CSMs are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaiMeasure {
    Cosine,
    Ssim,
    Mse,
    Mae,
}

impl SaiMeasure {
    pub const ALL: [SaiMeasure; 4] = [
        SaiMeasure::Cosine,
        SaiMeasure::Ssim,
        SaiMeasure::Mse,
        SaiMeasure::Mae,
    ];

    /// Whether larger values mean better alignment (similarities) or worse
    /// (distances).
    pub fn higher_is_better(self) -> bool {
        matches!(self, SaiMeasure::Cosine | SaiMeasure::Ssim)
    }

    pub fn name(self) -> &'static str {
        match self {
            SaiMeasure::Cosine => "cosine",
            SaiMeasure::Ssim => "ssim",
            SaiMeasure::Mse => "mse",
            SaiMeasure::Mae => "mae",
        }
    }
}

impl fmt::Display for SaiMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SaiMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SaiMeasure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown measure {s:?} (expected cosine, ssim, mse or mae)"
                ))
            })
    }
}

/// Similarity alignment index between two CSMs of the same size.
///
/// Both matrices are min-max normalized over their off-diagonal entries
/// first. Cosine, MSE and MAE compare the off-diagonal entries flattened in
/// row-major order; SSIM compares the full normalized matrices as images.
pub fn sai<T: Real>(
    a: &ClassSimilarityMatrix<T>,
    b: &ClassSimilarityMatrix<T>,
    measure: SaiMeasure,
) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::Shape(format!(
            "cannot compare {0}x{0} and {1}x{1} matrices",
            a.n(),
            b.n()
        )));
    }
    if a.n() < 2 {
        return Err(Error::Domain("SAI needs at least 2 classes".into()));
    }
    let na = normalized_offdiag(a);
    let nb = normalized_offdiag(b);
    if measure == SaiMeasure::Ssim {
        return ssim_matrix(na.matrix(), nb.matrix());
    }

    let u = na.off_diagonal();
    let v = nb.off_diagonal();
    let count = T::from_count(u.len());
    let pairs = u.iter().zip(&v);
    Ok(match measure {
        SaiMeasure::Cosine => {
            let dot: T = pairs.map(|(&x, &y)| x * y).sum();
            let nu = u.iter().map(|&x| x * x).sum::<T>().sqrt();
            let nv = v.iter().map(|&y| y * y).sum::<T>().sqrt();
            if nu == T::zero() || nv == T::zero() {
                return Err(Error::Domain(
                    "cosine SAI undefined: a normalized matrix has no nonzero off-diagonal entry"
                        .into(),
                ));
            }
            dot / (nu * nv)
        }
        SaiMeasure::Mse => pairs.map(|(&x, &y)| (x - y) * (x - y)).sum::<T>() / count,
        SaiMeasure::Mae => pairs.map(|(&x, &y)| (x - y).abs()).sum::<T>() / count,
        SaiMeasure::Ssim => unreachable!(),
    })
}

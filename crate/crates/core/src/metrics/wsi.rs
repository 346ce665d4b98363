use serde::Serialize;

use crate::csm::{ClassSimilarityMatrix, CsmKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Weights similarity index: upper-triangle mean plus per-class means of the
/// top and bottom 5% of raw cosine similarities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WsiTriple<T> {
    pub mean: T,
    pub max: T,
    pub min: T,
}

const UPPER_Q: f64 = 0.95;
const LOWER_Q: f64 = 0.05;

/// Linear-interpolation quantile of ascending-sorted values (inclusive
/// endpoints: q = 0 is the minimum, q = 1 the maximum).
pub fn quantile_linear<T: Real>(sorted: &[T], q: f64) -> T {
    assert!(!sorted.is_empty(), "quantile of an empty set");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = T::lit(h - lo as f64);
    let v = sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
    v.max(sorted[0]).min(sorted[sorted.len() - 1])
}

pub fn wsi<T: Real>(m: &ClassSimilarityMatrix<T>) -> Result<WsiTriple<T>> {
    match m.kind() {
        CsmKind::Network | CsmKind::Template => {}
        other => {
            return Err(Error::Domain(format!(
                "WSI summarizes raw cosine matrices (network or template), not a {:?} matrix",
                other
            )))
        }
    }
    let n = m.n();
    if n < 2 {
        return Err(Error::Domain("WSI needs at least 2 classes".into()));
    }

    let mut upper = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            upper = upper + m.get(i, j);
        }
    }
    let mean = upper / T::from_count(n * (n - 1) / 2);

    let mut max_acc = T::zero();
    let mut min_acc = T::zero();
    let mut row = Vec::with_capacity(n - 1);
    for i in 0..n {
        row.clear();
        row.extend((0..n).filter(|&j| j != i).map(|j| m.get(i, j)));
        row.sort_by(|a, b| a.partial_cmp(b).expect("finite similarities"));
        let hi_q = quantile_linear(&row, UPPER_Q);
        let lo_q = quantile_linear(&row, LOWER_Q);
        max_acc = max_acc + mean_where(&row, |v| v >= hi_q);
        min_acc = min_acc + mean_where(&row, |v| v <= lo_q);
    }
    let classes = T::from_count(n);
    Ok(WsiTriple {
        mean,
        max: max_acc / classes,
        min: min_acc / classes,
    })
}

fn mean_where<T: Real>(values: &[T], keep: impl Fn(T) -> bool) -> T {
    let (sum, count) = values
        .iter()
        .filter(|&&v| keep(v))
        .fold((T::zero(), 0usize), |(s, c), &v| (s + v, c + 1));
    sum / T::from_count(count)
}

use serde::Serialize;

use crate::csm::{check_counts, SortedCsm};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Dissimilarity metric and its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DmResult<T> {
    /// Mean rank normalized by `n - 1`, in [0, 1].
    pub dm: T,
    /// `1 - dm`.
    pub idm: T,
    pub mean_rank: T,
    /// Samples the mean runs over (all, or misclassified only).
    pub sample_count: T,
}

/// Result of a DM evaluation; the errors-only variant has nothing to average
/// when every prediction is correct.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DmOutcome<T> {
    Value(DmResult<T>),
    NoErrors,
}

impl<T: Copy> DmOutcome<T> {
    pub fn value(&self) -> Option<DmResult<T>> {
        match self {
            DmOutcome::Value(v) => Some(*v),
            DmOutcome::NoErrors => None,
        }
    }
}

/// Mean rank of predictions in the ground-truth rows of a sorted CSM.
///
/// `confusion[i][j]` counts samples of class `i` predicted as `j`, so every
/// sample in that cell has rank `sorted.rank(i, j)`.
pub fn dm_from_confusion<T: Real>(
    confusion: &DenseMatrix<T>,
    sorted: &SortedCsm,
    errors_only: bool,
) -> Result<DmOutcome<T>> {
    check_counts(confusion)?;
    let n = confusion.rows();
    if sorted.n() != n {
        return Err(Error::Shape(format!(
            "confusion matrix is {n}x{n} but the sorted CSM has {} classes",
            sorted.n()
        )));
    }
    if n < 2 {
        return Err(Error::Domain("DM needs at least 2 classes".into()));
    }
    let mut samples = T::zero();
    let mut rank_sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if errors_only && i == j {
                continue;
            }
            let count = confusion.get(i, j);
            samples = samples + count;
            rank_sum = rank_sum + count * T::from_count(sorted.rank(i, j));
        }
    }
    if samples == T::zero() {
        if errors_only && confusion.sum() > T::zero() {
            return Ok(DmOutcome::NoErrors);
        }
        return Err(Error::Domain("confusion matrix holds no samples".into()));
    }
    let mean_rank = rank_sum / samples;
    let dm = mean_rank / T::from_count(n - 1);
    Ok(DmOutcome::Value(DmResult {
        dm,
        idm: T::one() - dm,
        mean_rank,
        sample_count: samples,
    }))
}

/// Errors-only IDM estimated from the all-samples DM and the accuracy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxIdm<T> {
    pub value: T,
    /// The raw estimate fell outside [0, 1] and was clamped.
    pub clamped: bool,
}

/// `1 - dm / (1 - accuracy)`, clamped to [0, 1].
///
/// Exact whenever every class ranks itself first, since correct samples then
/// contribute zero rank.
pub fn idm_errors_only_approx<T: Real>(dm: T, accuracy: T) -> Result<ApproxIdm<T>> {
    if !(accuracy >= T::zero() && accuracy <= T::one()) {
        return Err(Error::Domain(format!("accuracy {accuracy} outside [0, 1]")));
    }
    if accuracy == T::one() {
        return Err(Error::Domain(
            "errors-only IDM is undefined at accuracy 1 (no errors)".into(),
        ));
    }
    let raw = T::one() - dm / (T::one() - accuracy);
    let value = raw.max(T::zero()).min(T::one());
    Ok(ApproxIdm {
        value,
        clamped: value != raw,
    })
}

pub fn accuracy_from_confusion<T: Real>(confusion: &DenseMatrix<T>) -> Result<T> {
    check_counts(confusion)?;
    let total = confusion.sum();
    if total == T::zero() {
        return Err(Error::Domain("confusion matrix holds no samples".into()));
    }
    Ok(confusion.trace() / total)
}

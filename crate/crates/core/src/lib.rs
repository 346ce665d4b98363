//! Class similarity matrices and the metrics built on them.
//!
//! A class similarity matrix (CSM) holds pairwise similarities between the
//! classes of a classifier. This crate builds CSMs from classifier weights
//! (NCSM), per-class feature templates (TNCSM), confusion counts (CCSM) and
//! a WordNet-style taxonomy (SCSM), then summarizes a training run with:
//!
//! * SAI, the alignment between two CSMs (cosine, SSIM, MSE, MAE);
//! * DM / IDM, the mean rank of predictions in a sorted CSM;
//! * WSI, summary statistics of raw weight cosines.
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the run orchestration in [`series`] uses.

pub mod csm;
pub mod error;
pub mod ingest;
pub mod matrix;
pub mod metrics;
mod palette;
pub mod render;
pub mod scalar;
pub mod series;
pub mod taxonomy;

pub use csm::{
    ccsm_from_confusion, ncsm_from_weights, normalized_offdiag, sorted_csm, tncsm_from_templates,
    CsmKind, SortedCsm,
};
pub use error::{Error, Result};
pub use ingest::{load_manifest, ClassSpec, EpochEntry, RunManifest};
pub use metrics::{sai, wsi, DmOutcome, SaiMeasure};
pub use scalar::Real;
pub use taxonomy::{PathSimilarity, Taxonomy};

pub type Matrix = matrix::DenseMatrix<f64>;
pub type Csm = csm::ClassSimilarityMatrix<f64>;
pub type Dm = metrics::DmResult<f64>;
pub type Wsi = metrics::WsiTriple<f64>;

pub type Matrix32 = matrix::DenseMatrix<f32>;
pub type Csm32 = csm::ClassSimilarityMatrix<f32>;

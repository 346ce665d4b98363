//! Scalar metrics over class similarity matrices.

mod dm;
mod sai;
mod ssim;
mod wsi;

pub use dm::{
    accuracy_from_confusion, dm_from_confusion, idm_errors_only_approx, ApproxIdm, DmOutcome,
    DmResult,
};
pub use sai::{sai, SaiMeasure};
pub use ssim::{ssim_matrix, SSIM_WINDOW};
pub use wsi::{quantile_linear, wsi, WsiTriple};

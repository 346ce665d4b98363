//! Per-epoch metric evaluation and assembly of metric curves.
//!
//! Metric names follow `FAMILY(ARGS)/measure` and are stable; output files
//! are keyed on them:
//!
//! | name                       | inputs                    |
//! |----------------------------|---------------------------|
//! | `ACC/top1`                 | confusion                 |
//! | `WSI/mean`, `/max`, `/min` | weights                   |
//! | `SAI(NCSM,SCSM)/<measure>` | weights, taxonomy         |
//! | `SAI(NCSM,CCSM)/cosine`    | weights, confusion        |
//! | `SAI(CCSM,SCSM)/cosine`    | confusion, taxonomy       |
//! | `SAI(TNCSM,NCSM)/cosine`   | templates, weights        |
//! | `SAI(TNCSM,SCSM)/cosine`   | templates, taxonomy       |
//! | `IDM(NCSM)/all`, `/errors` | weights, confusion        |
//! | `IDM(SCSM)/all`, `/errors` | confusion, taxonomy       |
//!
//! Every declared metric ends up, per epoch, either as a value or as a gap
//! with a reason.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::csm::{
    ccsm_from_confusion, empty_confusion_rows, ncsm_from_weights, sorted_csm, tncsm_from_templates,
    CsmKind,
};
use crate::error::{Error, Result};
use crate::ingest::{EpochEntry, RunManifest};
use crate::metrics::{accuracy_from_confusion, dm_from_confusion, sai, wsi, DmOutcome, SaiMeasure};
use crate::taxonomy::{scsm_from_taxonomy, Taxonomy};
use crate::{Csm, Matrix};

pub const ACCURACY: &str = "ACC/top1";
pub const WSI_MEAN: &str = "WSI/mean";
pub const WSI_MAX: &str = "WSI/max";
pub const WSI_MIN: &str = "WSI/min";
pub const NIDM_ALL: &str = "IDM(NCSM)/all";
pub const NIDM_ERRORS: &str = "IDM(NCSM)/errors";
pub const WIDM_ALL: &str = "IDM(SCSM)/all";
pub const WIDM_ERRORS: &str = "IDM(SCSM)/errors";

pub fn sai_name(a: CsmKind, b: CsmKind, measure: SaiMeasure) -> String {
    format!("SAI({},{})/{}", a.abbreviation(), b.abbreviation(), measure)
}

/// Which SAI measures to report for the network/semantic pair. The other
/// pairs always use cosine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricPlan {
    pub sai_measures: Vec<SaiMeasure>,
}

impl Default for MetricPlan {
    fn default() -> Self {
        Self {
            sai_measures: SaiMeasure::ALL.to_vec(),
        }
    }
}

impl MetricPlan {
    pub fn declared_metrics(&self) -> Vec<String> {
        use CsmKind::*;
        let mut names = vec![
            ACCURACY.to_string(),
            WSI_MEAN.to_string(),
            WSI_MAX.to_string(),
            WSI_MIN.to_string(),
        ];
        names.extend(
            self.sai_measures
                .iter()
                .map(|&m| sai_name(Network, Semantic, m)),
        );
        for (a, b) in [
            (Network, Confusion),
            (Confusion, Semantic),
            (Template, Network),
            (Template, Semantic),
        ] {
            names.push(sai_name(a, b, SaiMeasure::Cosine));
        }
        names.extend([NIDM_ALL, NIDM_ERRORS, WIDM_ALL, WIDM_ERRORS].map(String::from));
        names
    }
}

/// The run's semantic reference matrix, or why there is none.
#[derive(Clone, Debug)]
pub enum SemanticReference {
    Available(Csm),
    Unavailable(String),
}

impl SemanticReference {
    /// Builds the SCSM once for the run. Classes without a synset id make it
    /// unavailable rather than failing; a synset id the taxonomy lacks is an
    /// error.
    pub fn for_run(manifest: &RunManifest, taxonomy: Option<&Taxonomy>) -> Result<Self> {
        let Some(taxonomy) = taxonomy else {
            return Ok(Self::Unavailable("no taxonomy given".into()));
        };
        let missing = manifest.classes_without_synset();
        if !missing.is_empty() {
            return Ok(Self::Unavailable(format!(
                "classes without synset_id: {}",
                missing.join(", ")
            )));
        }
        scsm_from_taxonomy(taxonomy, &manifest.classes).map(Self::Available)
    }

    pub fn matrix(&self) -> Option<&Csm> {
        match self {
            Self::Available(m) => Some(m),
            Self::Unavailable(_) => None,
        }
    }
}

/// Raw numeric artifacts of one epoch.
#[derive(Clone, Debug, Default)]
pub struct EpochArtifacts {
    pub weights: Option<Matrix>,
    pub confusion: Option<Matrix>,
    pub templates: Option<Matrix>,
}

impl EpochArtifacts {
    pub fn load(manifest: &RunManifest, entry: &EpochEntry) -> Result<Self> {
        Ok(Self {
            weights: manifest.load_weights(entry)?,
            confusion: manifest.load_confusion(entry)?,
            templates: manifest.load_templates(entry)?,
        })
    }
}

/// CSMs built from one epoch's artifacts.
#[derive(Clone, Debug, Default)]
pub struct EpochMatrices {
    pub ncsm: Option<Csm>,
    pub ccsm: Option<Csm>,
    pub tncsm: Option<Csm>,
}

impl EpochMatrices {
    pub fn iter(&self) -> impl Iterator<Item = &Csm> {
        [&self.ncsm, &self.ccsm, &self.tncsm].into_iter().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochReport {
    pub epoch: u64,
    pub available: Vec<CsmKind>,
    pub scalars: BTreeMap<String, f64>,
    pub gaps: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl EpochReport {
    fn new(epoch: u64) -> Self {
        Self {
            epoch,
            available: Vec::new(),
            scalars: BTreeMap::new(),
            gaps: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn put(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    fn gap(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.gaps.insert(name.into(), reason.into());
    }
}

#[derive(Clone, Debug)]
pub struct EpochEvaluation {
    pub report: EpochReport,
    pub matrices: EpochMatrices,
}

/// Loads one epoch's artifacts and computes every metric whose inputs exist.
pub fn compute_epoch(
    manifest: &RunManifest,
    entry: &EpochEntry,
    semantic: &SemanticReference,
    plan: &MetricPlan,
) -> Result<EpochReport> {
    let artifacts = EpochArtifacts::load(manifest, entry)?;
    evaluate_epoch(entry.epoch, &artifacts, semantic, plan).map(|e| e.report)
}

pub fn evaluate_epoch(
    epoch: u64,
    artifacts: &EpochArtifacts,
    semantic: &SemanticReference,
    plan: &MetricPlan,
) -> Result<EpochEvaluation> {
    evaluate(epoch, artifacts, semantic, plan).map_err(|e| match e {
        e @ Error::Epoch { .. } => e,
        e => e.in_epoch(epoch),
    })
}

fn evaluate(
    epoch: u64,
    artifacts: &EpochArtifacts,
    semantic: &SemanticReference,
    plan: &MetricPlan,
) -> Result<EpochEvaluation> {
    use CsmKind::*;

    let mut report = EpochReport::new(epoch);
    let matrices = EpochMatrices {
        ncsm: artifacts
            .weights
            .as_ref()
            .map(ncsm_from_weights)
            .transpose()?,
        ccsm: artifacts
            .confusion
            .as_ref()
            .map(ccsm_from_confusion)
            .transpose()?,
        tncsm: artifacts
            .templates
            .as_ref()
            .map(tncsm_from_templates)
            .transpose()?,
    };
    let scsm = semantic.matrix();
    report.available = matrices.iter().map(|m| m.kind()).collect();
    if scsm.is_some() {
        report.available.push(Semantic);
    }
    report.available.sort();

    if let Some(cm) = &artifacts.confusion {
        let empty = empty_confusion_rows(cm);
        if !empty.is_empty() {
            let list: Vec<String> = empty.iter().map(|i| i.to_string()).collect();
            report.warnings.push(format!(
                "confusion rows without samples (classes {}); their CCSM rows are zero",
                list.join(", ")
            ));
        }
    }
    if let SemanticReference::Unavailable(why) = semantic {
        report
            .warnings
            .push(format!("semantic metrics unavailable: {why}"));
    }

    let semantic_gap = match semantic {
        SemanticReference::Available(_) => String::new(),
        SemanticReference::Unavailable(why) => format!("semantic reference unavailable: {why}"),
    };
    let missing = |needs: &[(&str, bool)]| -> Option<String> {
        let absent: Vec<&str> = needs
            .iter()
            .filter(|(_, present)| !present)
            .map(|(what, _)| *what)
            .collect();
        if absent.is_empty() {
            return None;
        }
        if absent == ["taxonomy"] {
            return Some(semantic_gap.clone());
        }
        Some(format!("missing {}", absent.join(" and ")))
    };
    let has_w = matrices.ncsm.is_some();
    let has_c = matrices.ccsm.is_some();
    let has_t = matrices.tncsm.is_some();
    let has_s = scsm.is_some();

    match &artifacts.confusion {
        Some(cm) => report.put(ACCURACY, accuracy_from_confusion(cm)?),
        None => report.gap(ACCURACY, "missing confusion"),
    }

    match &matrices.ncsm {
        Some(ncsm) => {
            let w = wsi(ncsm)?;
            report.put(WSI_MEAN, w.mean);
            report.put(WSI_MAX, w.max);
            report.put(WSI_MIN, w.min);
        }
        None => {
            for name in [WSI_MEAN, WSI_MAX, WSI_MIN] {
                report.gap(name, "missing weights");
            }
        }
    }

    for &measure in &plan.sai_measures {
        let name = sai_name(Network, Semantic, measure);
        match (&matrices.ncsm, scsm) {
            (Some(n), Some(s)) => report.put(name, sai(n, s, measure)?),
            _ => report.gap(
                name,
                missing(&[("weights", has_w), ("taxonomy", has_s)]).expect("an input is absent"),
            ),
        }
    }

    let cosine_pairs = [
        (
            Network,
            Confusion,
            matrices.ncsm.as_ref(),
            matrices.ccsm.as_ref(),
            [("weights", has_w), ("confusion", has_c)],
        ),
        (
            Confusion,
            Semantic,
            matrices.ccsm.as_ref(),
            scsm,
            [("confusion", has_c), ("taxonomy", has_s)],
        ),
        (
            Template,
            Network,
            matrices.tncsm.as_ref(),
            matrices.ncsm.as_ref(),
            [("templates", has_t), ("weights", has_w)],
        ),
        (
            Template,
            Semantic,
            matrices.tncsm.as_ref(),
            scsm,
            [("templates", has_t), ("taxonomy", has_s)],
        ),
    ];
    for (ka, kb, a, b, needs) in cosine_pairs {
        let name = sai_name(ka, kb, SaiMeasure::Cosine);
        match (a, b) {
            (Some(a), Some(b)) => report.put(name, sai(a, b, SaiMeasure::Cosine)?),
            _ => report.gap(name, missing(&needs).expect("an input is absent")),
        }
    }

    let idm_sources = [
        (
            NIDM_ALL,
            NIDM_ERRORS,
            matrices.ncsm.as_ref(),
            ("weights", has_w),
        ),
        (WIDM_ALL, WIDM_ERRORS, scsm, ("taxonomy", has_s)),
    ];
    for (all_name, errors_name, reference, need) in idm_sources {
        match (&artifacts.confusion, reference) {
            (Some(cm), Some(reference)) => {
                let sorted = sorted_csm(reference);
                match dm_from_confusion(cm, &sorted, false)? {
                    DmOutcome::Value(r) => report.put(all_name, r.idm),
                    DmOutcome::NoErrors => unreachable!("all-samples DM always has samples"),
                }
                match dm_from_confusion(cm, &sorted, true)? {
                    DmOutcome::Value(r) => report.put(errors_name, r.idm),
                    DmOutcome::NoErrors => report.gap(errors_name, "no errors"),
                }
            }
            _ => {
                let why = missing(&[("confusion", has_c), need]).expect("an input is absent");
                report.gap(all_name, why.clone());
                report.gap(errors_name, why);
            }
        }
    }

    Ok(EpochEvaluation { report, matrices })
}

/// Values of one metric over epochs, with the epochs where it was unavailable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSeries {
    pub name: String,
    pub points: Vec<(u64, f64)>,
    pub gaps: Vec<u64>,
}

impl MetricSeries {
    /// Leading part of the name, e.g. `SAI` for `SAI(NCSM,SCSM)/cosine`.
    pub fn family(&self) -> &str {
        let end = self.name.find(['(', '/']).unwrap_or(self.name.len());
        &self.name[..end]
    }

    /// `epoch,value` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,value\n");
        for (epoch, value) in &self.points {
            out.push_str(&format!("{epoch},{value}\n"));
        }
        out
    }
}

/// File-system friendly form of a metric name:
/// `SAI(NCSM,SCSM)/cosine` becomes `SAI_NCSM_SCSM__cosine`.
pub fn file_stem(name: &str) -> String {
    name.replace('/', "__")
        .replace(['(', ','], "_")
        .replace(')', "")
}

/// Turns per-epoch reports (sorted by epoch) into one series per metric.
pub fn assemble_series(reports: &[EpochReport]) -> Result<Vec<MetricSeries>> {
    for pair in reports.windows(2) {
        if pair[1].epoch == pair[0].epoch {
            return Err(Error::Domain(format!("duplicate epoch {}", pair[0].epoch)));
        }
        if pair[1].epoch < pair[0].epoch {
            return Err(Error::Domain("reports not sorted".into()));
        }
    }
    let names: BTreeSet<&String> = reports
        .iter()
        .flat_map(|r| r.scalars.keys().chain(r.gaps.keys()))
        .collect();
    Ok(names
        .into_iter()
        .map(|name| {
            let mut series = MetricSeries {
                name: name.clone(),
                points: Vec::new(),
                gaps: Vec::new(),
            };
            for r in reports {
                match r.scalars.get(name) {
                    Some(&v) => series.points.push((r.epoch, v)),
                    None => series.gaps.push(r.epoch),
                }
            }
            series
        })
        .collect())
}

/// Combined JSON document: `{name: [[epoch, value], ...], ..., "gaps": {name: [epoch, ...]}}`.
pub fn series_json(series: &[MetricSeries]) -> String {
    let mut doc = Map::new();
    let mut gaps = Map::new();
    for s in series {
        let points: Vec<Value> = s.points.iter().map(|&(e, v)| json!([e, v])).collect();
        doc.insert(s.name.clone(), Value::Array(points));
        if !s.gaps.is_empty() {
            gaps.insert(s.name.clone(), json!(s.gaps));
        }
    }
    doc.insert("gaps".into(), Value::Object(gaps));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("series serialize");
    text.push('\n');
    text
}

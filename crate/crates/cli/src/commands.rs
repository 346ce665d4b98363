use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use dsi_core::csm::{read_csm, write_csm};
use dsi_core::render::{render_curves, render_heatmap, HeatmapScale};
use dsi_core::series::{
    assemble_series, evaluate_epoch, file_stem, series_json, EpochArtifacts, EpochReport,
    MetricPlan, MetricSeries, SemanticReference,
};
use dsi_core::taxonomy::{parse_taxonomy_json, parse_wordnet_noun_db, scsm_from_taxonomy};
use dsi_core::{load_manifest, sai, Csm, EpochEntry, SaiMeasure, Taxonomy};
use rayon::prelude::*;

use crate::args::{Cli, Command, CompareArgs, InspectArgs, ScsmArgs, TaxonomyArgs, TaxonomyFormat};

/// Why a command stopped: bad invocation (exit 2) or a failure while
/// working (exit 1).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Hard(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Hard(_) => 1,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Hard(e)
    }
}

impl From<dsi_core::Error> for Failure {
    fn from(e: dsi_core::Error) -> Self {
        Failure::Hard(e.into())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Hard(e) => write!(f, "{e:#}"),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Scsm(a) => scsm(&a),
        Command::Inspect(a) => inspect(&a),
        Command::Compare(a) => compare(&a),
    }
}

/// Resolves the taxonomy path and format and parses it. A directory stands
/// for the `data.noun` file inside it.
pub fn load_taxonomy(args: &TaxonomyArgs) -> Outcome<Option<Taxonomy>> {
    let Some(path) = &args.taxonomy else {
        return Ok(None);
    };
    let path = if path.is_dir() {
        path.join("data.noun")
    } else {
        path.clone()
    };
    let format = args.taxonomy_format.unwrap_or_else(|| {
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            TaxonomyFormat::Json
        } else {
            TaxonomyFormat::Wordnet
        }
    });
    let taxonomy = match format {
        TaxonomyFormat::Wordnet => parse_wordnet_noun_db(&path)?,
        TaxonomyFormat::Json => parse_taxonomy_json(&path)?,
    };
    Ok(Some(taxonomy))
}

fn create_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(Failure::Hard)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn write_scsm(scsm: &Csm, out: &Path) -> Outcome {
    write_csm(scsm, out.join("scsm.csv"))?;
    render_heatmap(scsm, HeatmapScale::Raw, out.join("scsm.png"))?;
    Ok(())
}

pub fn scsm(args: &ScsmArgs) -> Outcome {
    let manifest = load_manifest(&args.manifest)?;
    let taxonomy = load_taxonomy(&args.taxonomy)?.ok_or_else(|| {
        Failure::Usage("no taxonomy: pass --taxonomy or set DSI_WORDNET_DIR".into())
    })?;
    let scsm: Csm = scsm_from_taxonomy(&taxonomy, &manifest.classes)?;
    create_dir(&args.out)?;
    write_scsm(&scsm, &args.out)
}

fn select_epochs<'a>(
    entries: &'a [EpochEntry],
    args: &InspectArgs,
) -> Outcome<Vec<&'a EpochEntry>> {
    let Some(filter) = &args.epochs else {
        return Ok(entries.iter().collect());
    };
    let missing: Vec<String> = filter
        .listed
        .iter()
        .filter(|&&e| !entries.iter().any(|x| x.epoch == e))
        .map(u64::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(Failure::Usage(format!(
            "epochs not in manifest: {}",
            missing.join(", ")
        )));
    }
    let selected: Vec<_> = entries.iter().filter(|e| filter.selects(e.epoch)).collect();
    if selected.is_empty() {
        return Err(Failure::Usage(
            "epoch filter selects no manifest epoch".into(),
        ));
    }
    Ok(selected)
}

struct EpochOutput {
    report: EpochReport,
    elapsed: Duration,
}

fn process_epoch(
    manifest: &dsi_core::RunManifest,
    entry: &EpochEntry,
    semantic: &SemanticReference,
    plan: &MetricPlan,
    out: &Path,
    render: bool,
) -> anyhow::Result<EpochOutput> {
    let artifacts = EpochArtifacts::load(manifest, entry)?;
    let start = Instant::now();
    let evaluation = evaluate_epoch(entry.epoch, &artifacts, semantic, plan)?;
    let elapsed = start.elapsed();

    let stem = format!("epoch_{:06}", entry.epoch);
    let mut json = serde_json::to_string_pretty(&evaluation.report)?;
    json.push('\n');
    write_file(&out.join("epochs").join(format!("{stem}.json")), json)?;
    if render {
        for m in evaluation.matrices.iter() {
            let kind = m.kind().abbreviation().to_ascii_lowercase();
            let path = out.join("heatmaps").join(format!("{stem}_{kind}.png"));
            render_heatmap(m, HeatmapScale::Normalized, &path)?;
        }
    }
    Ok(EpochOutput {
        report: evaluation.report,
        elapsed,
    })
}

pub fn inspect(args: &InspectArgs) -> Outcome {
    let manifest = load_manifest(&args.manifest)?;
    let entries = select_epochs(&manifest.epochs, args)?;
    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let semantic = SemanticReference::for_run(&manifest, taxonomy.as_ref())?;
    if let (Some(_), SemanticReference::Unavailable(reason)) = (&taxonomy, &semantic) {
        eprintln!("warning: semantic reference unavailable: {reason}");
    }
    let plan = MetricPlan {
        sai_measures: args.measures.clone(),
    };
    let render = args.render_enabled();

    let out = args.out.as_path();
    create_dir(&out.join("epochs"))?;
    create_dir(&out.join("series"))?;
    if render {
        create_dir(&out.join("heatmaps"))?;
        create_dir(&out.join("curves"))?;
    }
    if let SemanticReference::Available(scsm) = &semantic {
        write_scsm(scsm, out)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| Failure::Hard(anyhow!(e)))?;
    let results: Vec<anyhow::Result<EpochOutput>> = pool.install(|| {
        entries
            .par_iter()
            .map(|entry| process_epoch(&manifest, entry, &semantic, &plan, out, render))
            .collect()
    });

    let mut reports = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(o) => {
                for w in &o.report.warnings {
                    eprintln!("warning: epoch {}: {w}", o.report.epoch);
                }
                if args.time {
                    eprintln!(
                        "epoch {}: metrics {:.3} ms",
                        o.report.epoch,
                        o.elapsed.as_secs_f64() * 1e3
                    );
                }
                reports.push(o.report);
            }
            Err(e) => errors.push(e),
        }
    }
    if let Some(first) = errors.into_iter().next() {
        return Err(Failure::Hard(first));
    }

    let series = assemble_series(&reports)?;
    for s in &series {
        write_file(
            &out.join("series")
                .join(format!("{}.csv", file_stem(&s.name))),
            s.to_csv(),
        )?;
    }
    write_file(&out.join("series.json"), series_json(&series))?;
    if render {
        let mut families: BTreeMap<&str, Vec<MetricSeries>> = BTreeMap::new();
        for s in series.iter().filter(|s| !s.points.is_empty()) {
            families.entry(s.family()).or_default().push(s.clone());
        }
        for (family, members) in families {
            render_curves(&members, out.join("curves").join(format!("{family}.svg")))?;
        }
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Outcome {
    let a: Csm = read_csm(&args.matrix_a)?;
    let b: Csm = read_csm(&args.matrix_b)?;
    if a.n() != b.n() {
        return Err(Failure::Usage(format!(
            "dimension mismatch: {} is {n}x{n}, {} is {m}x{m}",
            args.matrix_a.display(),
            args.matrix_b.display(),
            n = a.n(),
            m = b.n()
        )));
    }
    let measures = if args.all {
        SaiMeasure::ALL.to_vec()
    } else {
        vec![args.measure]
    };
    let mut values = serde_json::Map::new();
    for m in measures {
        let v = sai(&a, &b, m)?;
        if args.all {
            println!("{m} {v:.6}");
        } else {
            println!("{v:.6}");
        }
        values.insert(m.name().to_string(), v.into());
    }
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        let mut json = serde_json::to_string_pretty(&values).map_err(anyhow::Error::from)?;
        json.push('\n');
        write_file(&PathBuf::from(dir).join("compare.json"), json)?;
    }
    Ok(())
}

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsi_core::SaiMeasure;

#[derive(Debug, Parser)]
#[command(
    name = "dsi",
    version,
    about = "Inspect class similarity structure across training epochs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the semantic class similarity matrix of a run's classes.
    Scsm(ScsmArgs),
    /// Compute every metric for every epoch of a run and write a report tree.
    Inspect(InspectArgs),
    /// Alignment index between two saved class similarity matrices.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaxonomyFormat {
    Wordnet,
    Json,
}

#[derive(Debug, Args)]
pub struct TaxonomyArgs {
    /// WordNet `data.noun` file (or a directory holding it), or a JSON
    /// taxonomy.
    #[arg(long, env = "DSI_WORDNET_DIR")]
    pub taxonomy: Option<PathBuf>,
    /// Defaults to json for `.json` files and wordnet otherwise.
    #[arg(long, value_enum)]
    pub taxonomy_format: Option<TaxonomyFormat>,
}

#[derive(Debug, Args)]
pub struct ScsmArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub taxonomy: TaxonomyArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub taxonomy: TaxonomyArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Epochs to compute: `5`, `1,3,5`, `10..20` (inclusive) or a mix.
    #[arg(long, value_parser = parse_epoch_filter)]
    pub epochs: Option<EpochFilter>,
    /// SAI measures for the network/semantic pair.
    #[arg(long, value_delimiter = ',', default_values_t = SaiMeasure::ALL)]
    pub measures: Vec<SaiMeasure>,
    /// Write per-epoch heatmaps and metric curves.
    #[arg(long, overrides_with = "no_render")]
    pub render: bool,
    #[arg(long, overrides_with = "render")]
    pub no_render: bool,
    /// Worker threads for epoch evaluation.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Report per-epoch metric computation time on stderr.
    #[arg(long)]
    pub time: bool,
}

impl InspectArgs {
    pub fn render_enabled(&self) -> bool {
        !self.no_render
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub matrix_a: PathBuf,
    pub matrix_b: PathBuf,
    #[arg(long, default_value_t = SaiMeasure::Cosine)]
    pub measure: SaiMeasure,
    /// Print every measure.
    #[arg(long)]
    pub all: bool,
    /// Directory for a `compare.json` with the printed values.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Selected epochs: explicitly listed ones, which must exist, and inclusive
/// ranges, which select whatever epochs fall inside.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpochFilter {
    pub listed: BTreeSet<u64>,
    pub ranges: Vec<(u64, u64)>,
}

impl EpochFilter {
    pub fn selects(&self, epoch: u64) -> bool {
        self.listed.contains(&epoch) || self.ranges.iter().any(|&(a, b)| a <= epoch && epoch <= b)
    }
}

pub fn parse_epoch_filter(s: &str) -> Result<EpochFilter, String> {
    let mut filter = EpochFilter::default();
    let number = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid epoch {:?}", t.trim()))
    };
    for item in s.split(',').filter(|t| !t.trim().is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (number(a)?, number(b)?);
            if a > b {
                return Err(format!("empty epoch range {a}..{b}"));
            }
            filter.ranges.push((a, b));
        } else {
            filter.listed.insert(number(item)?);
        }
    }
    if filter.listed.is_empty() && filter.ranges.is_empty() {
        return Err("no epochs given".into());
    }
    Ok(filter)
}

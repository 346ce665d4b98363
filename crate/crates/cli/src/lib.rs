//! Command-line front end: `dsi scsm`, `dsi inspect` and `dsi compare`.

mod args;
mod commands;

pub use args::{
    parse_epoch_filter, Cli, Command, CompareArgs, EpochFilter, InspectArgs, ScsmArgs,
    TaxonomyArgs, TaxonomyFormat,
};
pub use commands::{compare, inspect, load_taxonomy, run, scsm, Failure};

//! Command-line front end for `unimeasure`.
//!
//! Reads comma-delimited numeric tables, infers a reference measure per
//! column and reports codelengths, densities, independence tests and
//! dependency forests as JSON.

pub mod args;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod schema;
pub mod simulate;

pub use args::{Cli, Command};
pub use commands::run;
pub use config::RunConfig;
pub use dataset::{parse_dataset, Dataset};
pub use schema::{infer_column_kind, ColumnKind, ColumnSchema};

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::simulate::Generator;

#[derive(Debug, Parser)]
#[command(name = "unimeasure", version, about = "Universal-measure codelengths, densities and independence tests for CSV data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Deepest histogram level for codelength and density [default: 16]
    #[arg(long, global = true)]
    pub levels: Option<usize>,

    /// Deepest histogram level per axis for indep and forest [default: 8]
    #[arg(long, global = true)]
    pub joint_levels: Option<usize>,

    /// Histogram center override, repeatable
    #[arg(long, global = true, value_name = "COL=V", allow_hyphen_values = true)]
    pub mu: Vec<String>,

    /// Histogram scale override, repeatable
    #[arg(long, global = true, value_name = "COL=V")]
    pub sigma: Vec<String>,

    /// Prior probability of independence [default: 0.5]
    #[arg(long, global = true)]
    pub prior_p: Option<f64>,

    /// Seed for simulate [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Column schema overrides: a JSON file, or inline JSON. Accepts an array
    /// of column schemas or any report carrying a "schema" field.
    #[arg(long, global = true, value_name = "JSON")]
    pub schema: Option<String>,

    /// Write the report here instead of stdout; for simulate, the CSV path
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Codelength in bits of each column under its universal mixture
    Codelength {
        input: PathBuf,
        /// Restrict to these columns
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
    /// Predictive density of one column at given points
    Density {
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// Evenly spaced points, START:STOP:COUNT
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Explicit points
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Vec<f64>,
    },
    /// Bayes-factor independence test for two columns
    Indep {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// All-pairs independence tests and the dependency forest
    Forest {
        input: PathBuf,
        /// Restrict to these columns
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
    /// Write a seeded synthetic dataset to --output
    Simulate {
        #[arg(value_enum)]
        generator: Generator,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Codelength { .. } => "codelength",
            Command::Density { .. } => "density",
            Command::Indep { .. } => "indep",
            Command::Forest { .. } => "forest",
            Command::Simulate { .. } => "simulate",
        }
    }
}

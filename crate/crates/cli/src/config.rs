use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use unimeasure::partition::MAX_LEVEL;

use crate::args::{Cli, Command};
use crate::schema::ColumnSchema;

pub const DEFAULT_LEVELS: usize = 16;
pub const DEFAULT_JOINT_LEVELS: usize = 8;
pub const DEFAULT_PRIOR_P: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{flag} cannot be used with {command}")]
    FlagNotAllowed { flag: &'static str, command: &'static str },
    #[error("{0} requires --output")]
    MissingOutput(&'static str),
    #[error("{flag} must be at most {MAX_LEVEL}, got {value}")]
    LevelTooDeep { flag: &'static str, value: usize },
    #[error("--prior-p must lie strictly between 0 and 1, got {0}")]
    PriorOutOfRange(f64),
    #[error("expected COL=VALUE, got {0:?}")]
    BadAssignment(String),
    #[error("{flag} {column}: {reason}")]
    BadOverride { flag: &'static str, column: String, reason: String },
    #[error("column {0:?} is given twice")]
    RepeatedColumn(String),
    #[error("schema: {0}")]
    Schema(String),
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub levels: usize,
    pub joint_levels: usize,
    pub prior_p: f64,
    pub mu: BTreeMap<String, f64>,
    pub sigma: BTreeMap<String, f64>,
    pub seed: u64,
    pub schema: Vec<ColumnSchema>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS,
            joint_levels: DEFAULT_JOINT_LEVELS,
            prior_p: DEFAULT_PRIOR_P,
            mu: BTreeMap::new(),
            sigma: BTreeMap::new(),
            seed: 0,
            schema: Vec::new(),
            output: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemaDoc {
    List(Vec<ColumnSchema>),
    Report { schema: Vec<ColumnSchema> },
}

fn parse_assignments(flag: &'static str, items: &[String]) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut out = BTreeMap::new();
    for item in items {
        let (col, val) = item.rsplit_once('=').ok_or_else(|| ConfigError::BadAssignment(item.clone()))?;
        let v: f64 = val.trim().parse().map_err(|_| ConfigError::BadAssignment(item.clone()))?;
        if !v.is_finite() || (flag == "--sigma" && v <= 0.0) {
            let reason = if flag == "--sigma" { "must be positive and finite" } else { "must be finite" };
            return Err(ConfigError::BadOverride { flag, column: col.to_string(), reason: reason.into() });
        }
        if out.insert(col.to_string(), v).is_some() {
            return Err(ConfigError::RepeatedColumn(col.to_string()));
        }
    }
    Ok(out)
}

/// Reads `--schema` as inline JSON when it looks like JSON, else as a path.
pub fn load_schema(arg: &str) -> Result<Vec<ColumnSchema>, ConfigError> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| ConfigError::Schema(format!("{arg}: {e}")))?
    };
    let doc: SchemaDoc = serde_json::from_str(&text).map_err(|e| ConfigError::Schema(e.to_string()))?;
    let list = match doc {
        SchemaDoc::List(l) | SchemaDoc::Report { schema: l } => l,
    };
    let mut seen = std::collections::HashSet::new();
    for s in &list {
        s.validate().map_err(ConfigError::Schema)?;
        if !seen.insert(s.name.as_str()) {
            return Err(ConfigError::RepeatedColumn(s.name.clone()));
        }
    }
    Ok(list)
}

impl RunConfig {
    /// Applies defaults and rejects flags the chosen subcommand does not use.
    pub fn from_cli(cli: &Cli) -> Result<Self, ConfigError> {
        let command = cli.command.name();
        let deny = |given: bool, flag: &'static str| {
            if given {
                Err(ConfigError::FlagNotAllowed { flag, command })
            } else {
                Ok(())
            }
        };
        let marginal = matches!(cli.command, Command::Codelength { .. } | Command::Density { .. });
        let pairwise = matches!(cli.command, Command::Indep { .. } | Command::Forest { .. });
        let simulate = matches!(cli.command, Command::Simulate { .. });
        deny(cli.levels.is_some() && !marginal, "--levels")?;
        deny(cli.joint_levels.is_some() && !pairwise, "--joint-levels")?;
        deny(cli.prior_p.is_some() && !pairwise, "--prior-p")?;
        deny(cli.seed.is_some() && !simulate, "--seed")?;
        deny(!cli.mu.is_empty() && simulate, "--mu")?;
        deny(!cli.sigma.is_empty() && simulate, "--sigma")?;
        deny(cli.schema.is_some() && simulate, "--schema")?;
        if simulate && cli.output.is_none() {
            return Err(ConfigError::MissingOutput(command));
        }

        let levels = cli.levels.unwrap_or(DEFAULT_LEVELS);
        if levels > MAX_LEVEL {
            return Err(ConfigError::LevelTooDeep { flag: "--levels", value: levels });
        }
        let joint_levels = cli.joint_levels.unwrap_or(DEFAULT_JOINT_LEVELS);
        if joint_levels > MAX_LEVEL {
            return Err(ConfigError::LevelTooDeep { flag: "--joint-levels", value: joint_levels });
        }
        let prior_p = cli.prior_p.unwrap_or(DEFAULT_PRIOR_P);
        if !(prior_p > 0.0 && prior_p < 1.0) {
            return Err(ConfigError::PriorOutOfRange(prior_p));
        }
        Ok(Self {
            levels,
            joint_levels,
            prior_p,
            mu: parse_assignments("--mu", &cli.mu)?,
            sigma: parse_assignments("--sigma", &cli.sigma)?,
            seed: cli.seed.unwrap_or(0),
            schema: cli.schema.as_deref().map(load_schema).transpose()?.unwrap_or_default(),
            output: cli.output.clone(),
        })
    }
}

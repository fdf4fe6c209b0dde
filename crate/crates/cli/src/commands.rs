//! Subcommand execution. Every report is a pure function of the input bytes,
//! the configuration and the seed.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use unimeasure::{analyze_pair, build_forest, EstimatorState, ForestEdge, PairConfig, PairEntry, PairReport};

use crate::args::{Cli, Command};
use crate::config::RunConfig;
use crate::dataset::{parse_dataset, Dataset};
use crate::schema::{infer_schema, ColumnKind, ColumnSchema};
use crate::simulate::{generate, Generator};

#[derive(Debug, Serialize)]
pub struct ColumnCodelength {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(with = "unimeasure::ext_float")]
    pub codelength_bits: f64,
    #[serde(with = "unimeasure::ext_float")]
    pub bits_per_sample: f64,
}

#[derive(Debug, Serialize)]
pub struct CodelengthReport {
    pub command: &'static str,
    pub levels: usize,
    pub n: usize,
    pub columns: Vec<ColumnCodelength>,
    pub schema: Vec<ColumnSchema>,
}

#[derive(Debug, Serialize)]
pub struct DensityPoint {
    pub y: f64,
    #[serde(with = "unimeasure::ext_float")]
    pub density: f64,
}

#[derive(Debug, Serialize)]
pub struct DensityReport {
    pub command: &'static str,
    pub column: String,
    pub levels: usize,
    pub n: usize,
    pub points: Vec<DensityPoint>,
    pub state: EstimatorState,
    pub schema: Vec<ColumnSchema>,
}

#[derive(Debug, Serialize)]
pub struct IndepReport {
    pub command: &'static str,
    pub x: String,
    pub y: String,
    pub n: usize,
    pub joint_levels: usize,
    pub report: PairReport,
    pub schema: Vec<ColumnSchema>,
}

#[derive(Debug, Serialize)]
pub struct ForestReport {
    pub command: &'static str,
    pub n: usize,
    pub joint_levels: usize,
    pub prior_p: f64,
    pub pairs: Vec<PairEntry>,
    pub edges: Vec<ForestEdge>,
    pub schema: Vec<ColumnSchema>,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    pub generator: Generator,
    pub n: usize,
    pub seed: u64,
    pub columns: Vec<String>,
    pub output: String,
}

/// Inferred schemas for `names`, with `--schema`, `--mu` and `--sigma`
/// applied in that order.
pub fn resolve_schema(data: &Dataset, names: &[String], cfg: &RunConfig) -> Result<Vec<ColumnSchema>> {
    for name in cfg.schema.iter().map(|s| &s.name).chain(cfg.mu.keys()).chain(cfg.sigma.keys()) {
        data.column(name)?;
    }
    names
        .iter()
        .map(|name| {
            let mut s = match cfg.schema.iter().find(|s| &s.name == name) {
                Some(s) => s.clone(),
                None => infer_schema(name, data.column(name)?),
            };
            if let Some(&mu) = cfg.mu.get(name) {
                s.center = mu;
            }
            if let Some(&sigma) = cfg.sigma.get(name) {
                s.scale = sigma;
            }
            s.validate().map_err(|e| anyhow!(e))?;
            Ok(s)
        })
        .collect()
}

fn selected(data: &Dataset, columns: &[String]) -> Result<Vec<String>> {
    if columns.is_empty() {
        return Ok(data.names().to_vec());
    }
    for (i, c) in columns.iter().enumerate() {
        data.column(c)?;
        if columns[..i].contains(c) {
            bail!("column {c:?} is selected twice");
        }
    }
    Ok(columns.to_vec())
}

pub fn codelength(data: &Dataset, columns: &[String], cfg: &RunConfig) -> Result<CodelengthReport> {
    let names = selected(data, columns)?;
    let schema = resolve_schema(data, &names, cfg)?;
    let n = data.rows();
    let columns = schema
        .iter()
        .map(|s| {
            let mut est = s.model(cfg.levels)?.estimator()?;
            est.observe_all(data.column(&s.name)?).with_context(|| format!("column {:?}", s.name))?;
            let bits = est.codelength_bits();
            Ok(ColumnCodelength { name: s.name.clone(), kind: s.kind, codelength_bits: bits, bits_per_sample: bits / n as f64 })
        })
        .collect::<Result<_>>()?;
    Ok(CodelengthReport { command: "codelength", levels: cfg.levels, n, columns, schema })
}

/// Parses `START:STOP:COUNT` into evenly spaced points, both ends included.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, c] = parts[..] else { bail!("grid must be START:STOP:COUNT, got {text:?}") };
    let start: f64 = a.trim().parse().with_context(|| format!("grid start {a:?}"))?;
    let stop: f64 = b.trim().parse().with_context(|| format!("grid stop {b:?}"))?;
    let count: usize = c.trim().parse().with_context(|| format!("grid count {c:?}"))?;
    if !start.is_finite() || !stop.is_finite() || count == 0 || (count == 1 && start != stop) {
        bail!("grid {text:?} needs finite ends and a positive count (1 only when START = STOP)");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect())
}

pub fn density(data: &Dataset, column: &str, points: &[f64], cfg: &RunConfig) -> Result<DensityReport> {
    if points.is_empty() {
        bail!("density needs --grid or --at");
    }
    let schema = resolve_schema(data, &[column.to_string()], cfg)?;
    let mut est = schema[0].model(cfg.levels)?.estimator()?;
    est.observe_all(data.column(column)?)?;
    let points = points
        .iter()
        .map(|&y| match est.density_at(y) {
            Ok(d) => Ok(DensityPoint { y, density: d }),
            Err(unimeasure::Error::OutOfSupport(_)) => Ok(DensityPoint { y, density: 0.0 }),
            Err(e) => Err(e.into()),
        })
        .collect::<Result<_>>()?;
    Ok(DensityReport {
        command: "density",
        column: column.to_string(),
        levels: cfg.levels,
        n: data.rows(),
        points,
        state: est.export_state(),
        schema,
    })
}

fn pair_report(data: &Dataset, sx: &ColumnSchema, sy: &ColumnSchema, cfg: &RunConfig) -> Result<PairReport> {
    let pc = PairConfig { x: sx.model(cfg.joint_levels)?, y: sy.model(cfg.joint_levels)?, prior_p: cfg.prior_p };
    analyze_pair(data.column(&sx.name)?, data.column(&sy.name)?, &pc)
        .with_context(|| format!("pair ({:?}, {:?})", sx.name, sy.name))
}

pub fn indep(data: &Dataset, x: &str, y: &str, cfg: &RunConfig) -> Result<IndepReport> {
    if x == y {
        bail!("--x and --y name the same column");
    }
    let schema = resolve_schema(data, &[x.to_string(), y.to_string()], cfg)?;
    let report = pair_report(data, &schema[0], &schema[1], cfg)?;
    Ok(IndepReport {
        command: "indep",
        x: x.to_string(),
        y: y.to_string(),
        n: data.rows(),
        joint_levels: cfg.joint_levels,
        report,
        schema,
    })
}

pub fn forest(data: &Dataset, columns: &[String], cfg: &RunConfig) -> Result<ForestReport> {
    let names = selected(data, columns)?;
    if names.len() < 2 {
        bail!("forest needs at least two columns");
    }
    let schema = resolve_schema(data, &names, cfg)?;
    let index_pairs: Vec<(usize, usize)> =
        (0..schema.len()).flat_map(|i| (i + 1..schema.len()).map(move |j| (i, j))).collect();
    // Collecting an indexed parallel iterator keeps the pair order.
    let pairs = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let report = pair_report(data, &schema[i], &schema[j], cfg)?;
            Ok(PairEntry { x: schema[i].name.clone(), y: schema[j].name.clone(), report })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = build_forest(&pairs);
    Ok(ForestReport {
        command: "forest",
        n: data.rows(),
        joint_levels: cfg.joint_levels,
        prior_p: cfg.prior_p,
        pairs,
        edges,
        schema,
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Runs the parsed command line. Returns the JSON document to print, or
/// `None` when it was written to `--output`.
pub fn run(cli: &Cli) -> Result<Option<String>> {
    let cfg = RunConfig::from_cli(cli)?;
    let load = |p: &Path| parse_dataset(p).with_context(|| format!("reading {}", p.display()));
    let json = match &cli.command {
        Command::Codelength { input, columns } => to_json(&codelength(&load(input)?, columns, &cfg)?)?,
        Command::Density { input, column, grid, at } => {
            let mut points = match grid {
                Some(g) => parse_grid(g)?,
                None => Vec::new(),
            };
            points.extend_from_slice(at);
            to_json(&density(&load(input)?, column, &points, &cfg)?)?
        }
        Command::Indep { input, x, y } => to_json(&indep(&load(input)?, x, y, &cfg)?)?,
        Command::Forest { input, columns } => to_json(&forest(&load(input)?, columns, &cfg)?)?,
        Command::Simulate { generator, n } => {
            if *n == 0 {
                bail!("--n must be positive");
            }
            let out = cfg.output.as_ref().expect("checked by RunConfig");
            let data = generate(*generator, *n, cfg.seed);
            write_atomic(out, &data.to_csv()?)?;
            // The summary always goes to stdout since --output holds the data.
            return Ok(Some(to_json(&SimulateReport {
                command: "simulate",
                generator: *generator,
                n: *n,
                seed: cfg.seed,
                columns: data.names().to_vec(),
                output: out.display().to_string(),
            })?));
        }
    };
    match &cfg.output {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(json)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset {
        crate::simulate::generate(Generator::Duplicated, 200, 4)
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-2:-2:1").unwrap(), [-2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn overrides_apply_in_order() {
        let d = data();
        let mut cfg = RunConfig::default();
        let mut s = infer_schema("x", d.column("x").unwrap());
        s.center = 3.0;
        s.scale = 2.0;
        cfg.schema = vec![s];
        cfg.sigma.insert("x".into(), 0.5);
        let got = resolve_schema(&d, &["x".into(), "y".into()], &cfg).unwrap();
        assert_eq!((got[0].center, got[0].scale), (3.0, 0.5));
        assert_eq!(got[1], infer_schema("y", d.column("y").unwrap()));
        cfg.mu.insert("nope".into(), 1.0);
        assert!(resolve_schema(&d, &["x".into()], &cfg).is_err());
    }

    #[test]
    fn duplicated_pair_is_dependent() {
        let d = data();
        let r = indep(&d, "x", "y", &RunConfig::default()).unwrap();
        assert_eq!(r.report.decision, unimeasure::Decision::Dependent);
        assert!(indep(&d, "x", "x", &RunConfig::default()).is_err());
        assert!(indep(&d, "x", "w", &RunConfig::default()).is_err());
    }

    #[test]
    fn forest_single_edge() {
        let r = forest(&data(), &[], &RunConfig::default()).unwrap();
        assert_eq!(r.pairs.len(), 3);
        assert_eq!(r.edges.len(), 1);
        assert_eq!((r.edges[0].x.as_str(), r.edges[0].y.as_str()), ("x", "y"));
    }

    #[test]
    fn density_out_of_support_is_zero() {
        let d = Dataset::new(vec!["k".into()], vec![(0..100).map(|i| (i % 4) as f64).collect()]);
        let r = density(&d, "k", &[1.0, 1.5], &RunConfig { levels: 6, ..RunConfig::default() }).unwrap();
        assert!(r.points[0].density > 0.1);
        assert_eq!(r.points[1].density, 0.0);
        assert!(density(&d, "k", &[], &RunConfig::default()).is_err());
    }
}

//! Two-variable mixtures, the Bayes-factor independence test, and forests.
//!
//! The joint model scores pairs on the product cells `a × b` of level `j` of
//! the `x` sequence and level `k` of the `y` sequence:
//!
//! ```text
//! g_jk(xⁿ, yⁿ) = Q_jk((a₁,b₁) … (aₙ,bₙ)) / Π η_X(a_i) η_Y(b_i)
//! ```
//!
//! and mixes the grid with weights `w_jk`. Independence is decided when
//! `p · g_X · g_Y ≥ (1 − p) · g_XY`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{level_log_measures, LevelWeights, MixtureEstimator};
use crate::kt::KtState;
use crate::measure::ReferenceMeasure;
use crate::numeric::log_sum_exp;
use crate::partition::HistogramSequence;

/// Positive weights over the `(J+1) × (K+1)` level grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWeights {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
}

impl GridWeights {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != rows * cols || weights.is_empty() {
            return Err(Error::WeightCountMismatch { expected: rows * cols, got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total} > 1")));
        }
        Ok(Self { rows, cols, weights })
    }

    /// `w_jk = w_j · w_k`.
    pub fn product(x: &LevelWeights, y: &LevelWeights) -> Self {
        let weights = x
            .as_slice()
            .iter()
            .flat_map(|wx| y.as_slice().iter().map(move |wy| wx * wy))
            .collect();
        Self { rows: x.len(), cols: y.len(), weights }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.weights[j * self.cols + k]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone)]
struct GridTrack {
    kt: KtState,
    log_density: f64,
}

/// Mixture over product partitions of two histogram sequences.
#[derive(Debug, Clone)]
pub struct JointEstimator {
    partition_x: HistogramSequence,
    partition_y: HistogramSequence,
    log_weights: Vec<f64>,
    x_log_measure: Vec<Vec<f64>>,
    y_log_measure: Vec<Vec<f64>>,
    grid: Vec<GridTrack>,
    n: u64,
    cells_x: Vec<usize>,
    cells_y: Vec<usize>,
}

impl JointEstimator {
    pub fn new(
        partition_x: HistogramSequence,
        partition_y: HistogramSequence,
        measure_x: &ReferenceMeasure,
        measure_y: &ReferenceMeasure,
        weights: GridWeights,
    ) -> Result<Self> {
        let (rows, cols) = (partition_x.max_level() + 1, partition_y.max_level() + 1);
        if weights.shape() != (rows, cols) {
            return Err(Error::WeightCountMismatch { expected: rows * cols, got: weights.weights.len() });
        }
        let x_log_measure = level_log_measures(&partition_x, measure_x)?;
        let y_log_measure = level_log_measures(&partition_y, measure_y)?;
        let mut grid = Vec::with_capacity(rows * cols);
        for mx in &x_log_measure {
            for my in &y_log_measure {
                let size = (mx.len() as u64)
                    .checked_mul(my.len() as u64)
                    .ok_or_else(|| Error::InvalidPartition("product alphabet overflows".into()))?;
                grid.push(GridTrack { kt: KtState::new(size)?, log_density: 0.0 });
            }
        }
        Ok(Self {
            partition_x,
            partition_y,
            log_weights: weights.weights.iter().map(|w| w.ln()).collect(),
            x_log_measure,
            y_log_measure,
            grid,
            n: 0,
            cells_x: Vec::with_capacity(rows),
            cells_y: Vec::with_capacity(cols),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn levels(&self) -> (usize, usize) {
        (self.partition_x.max_level(), self.partition_y.max_level())
    }

    fn index(&self, j: usize, k: usize) -> usize {
        j * self.y_log_measure.len() + k
    }

    /// KT state of grid entry `(j, k)`; symbols are `a · |cells_y(k)| + b`.
    pub fn grid_state(&self, j: usize, k: usize) -> Option<&KtState> {
        let (jm, km) = self.levels();
        (j <= jm && k <= km).then(|| &self.grid[self.index(j, k)].kt)
    }

    pub fn grid_log_density(&self, j: usize, k: usize) -> Option<f64> {
        let (jm, km) = self.levels();
        (j <= jm && k <= km).then(|| self.grid[self.index(j, k)].log_density)
    }

    /// `ln g_XY(xⁿ, yⁿ)`.
    pub fn log_density(&self) -> f64 {
        log_sum_exp(self.log_weights.iter().zip(&self.grid).map(|(lw, g)| lw + g.log_density))
    }

    /// Adds the pair and returns the log predictive increment (`-inf` once
    /// every grid entry is dead).
    pub fn observe(&mut self, x: f64, y: f64) -> Result<f64> {
        let mut cx = std::mem::take(&mut self.cells_x);
        let mut cy = std::mem::take(&mut self.cells_y);
        let located = self
            .partition_x
            .locate_all(x, &mut cx)
            .and_then(|_| self.partition_y.locate_all(y, &mut cy));
        if let Err(e) = located {
            self.cells_x = cx;
            self.cells_y = cy;
            return Err(e);
        }
        let before = self.log_density();
        let cols = self.y_log_measure.len();
        for (j, &a) in cx.iter().enumerate() {
            let lx = self.x_log_measure[j][a];
            for (k, &b) in cy.iter().enumerate() {
                let width = self.y_log_measure[k].len();
                let track = &mut self.grid[j * cols + k];
                let log_kt = track.kt.observe_unchecked((a * width + b) as u64);
                track.log_density += log_kt - (lx + self.y_log_measure[k][b]);
            }
        }
        self.cells_x = cx;
        self.cells_y = cy;
        self.n += 1;
        let after = self.log_density();
        Ok(if after == f64::NEG_INFINITY { f64::NEG_INFINITY } else { after - before })
    }
}

/// Independence verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Independent,
    Dependent,
}

/// Outcome of [`analyze_pair`]. Logs are natural.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub log_gx: f64,
    pub log_gy: f64,
    pub log_gxy: f64,
    pub log_bayes_factor: f64,
    /// `(ln g_XY − ln g_X − ln g_Y) / n`; negative values are kept.
    pub mi_per_sample: f64,
    pub decision: Decision,
    pub prior_p: f64,
}

impl PairReport {
    /// Fills in the Bayes factor, MI estimate and decision from the three
    /// log densities.
    pub fn from_log_densities(log_gx: f64, log_gy: f64, log_gxy: f64, n: usize, prior_p: f64) -> Result<Self> {
        if !(prior_p > 0.0 && prior_p < 1.0) {
            return Err(Error::InvalidPrior(prior_p));
        }
        if n == 0 {
            return Err(Error::EmptySample);
        }
        if [log_gx, log_gy, log_gxy].iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMixture);
        }
        let log_bayes_factor = prior_p.ln() + log_gx + log_gy - (1.0 - prior_p).ln() - log_gxy;
        Ok(Self {
            log_gx,
            log_gy,
            log_gxy,
            log_bayes_factor,
            mi_per_sample: (log_gxy - log_gx - log_gy) / n as f64,
            decision: if log_bayes_factor >= 0.0 { Decision::Independent } else { Decision::Dependent },
            prior_p,
        })
    }
}

/// Partition, reference measure and level weights for one variable.
#[derive(Debug, Clone)]
pub struct VariableModel {
    pub partition: HistogramSequence,
    pub measure: ReferenceMeasure,
    pub weights: LevelWeights,
}

impl VariableModel {
    /// Uses the default level weights.
    pub fn new(partition: HistogramSequence, measure: ReferenceMeasure) -> Self {
        let weights = LevelWeights::default_for(partition.max_level());
        Self { partition, measure, weights }
    }

    pub fn estimator(&self) -> Result<MixtureEstimator> {
        MixtureEstimator::new(self.partition.clone(), self.measure.clone(), self.weights.clone())
    }
}

/// Models for both variables and the prior probability of independence.
#[derive(Debug, Clone)]
pub struct PairConfig {
    pub x: VariableModel,
    pub y: VariableModel,
    pub prior_p: f64,
}

impl PairConfig {
    pub fn joint_estimator(&self) -> Result<JointEstimator> {
        JointEstimator::new(
            self.x.partition.clone(),
            self.y.partition.clone(),
            &self.x.measure,
            &self.y.measure,
            GridWeights::product(&self.x.weights, &self.y.weights),
        )
    }
}

/// Runs both marginal mixtures and the joint mixture over the sample pairs
/// and applies the Bayes-factor rule.
pub fn analyze_pair(xs: &[f64], ys: &[f64], config: &PairConfig) -> Result<PairReport> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(config.prior_p > 0.0 && config.prior_p < 1.0) {
        return Err(Error::InvalidPrior(config.prior_p));
    }
    let mut gx = config.x.estimator()?;
    let mut gy = config.y.estimator()?;
    let mut gxy = config.joint_estimator()?;
    for (&x, &y) in xs.iter().zip(ys) {
        gx.observe(x)?;
        gy.observe(y)?;
        gxy.observe(x, y)?;
    }
    PairReport::from_log_densities(gx.log_density(), gy.log_density(), gxy.log_density(), xs.len(), config.prior_p)
}

/// A named column pair with its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub x: String,
    pub y: String,
    pub report: PairReport,
}

/// Selected forest edge; `weight = −log_bayes_factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestEdge {
    pub x: String,
    pub y: String,
    pub weight: f64,
}

/// Maximum-weight forest over the pairs decided dependent (Kruskal). Ties
/// are broken by name pair, ascending.
pub fn build_forest(pairs: &[PairEntry]) -> Vec<ForestEdge> {
    let mut candidates: Vec<ForestEdge> = pairs
        .iter()
        .filter_map(|p| {
            let weight = -p.report.log_bayes_factor;
            (weight > 0.0).then(|| {
                let (x, y) = if p.x <= p.y { (&p.x, &p.y) } else { (&p.y, &p.x) };
                ForestEdge { x: x.clone(), y: y.clone(), weight }
            })
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then_with(|| (&a.x, &a.y).cmp(&(&b.x, &b.y)))
    });

    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &candidates {
        let next = ids.len();
        ids.entry(e.x.as_str()).or_insert(next);
        let next = ids.len();
        ids.entry(e.y.as_str()).or_insert(next);
    }
    let mut sets = DisjointSets::new(ids.len());
    let mut forest = Vec::new();
    for e in &candidates {
        if sets.union(ids[e.x.as_str()], ids[e.y.as_str()]) {
            forest.push(e.clone());
        }
    }
    forest
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Interval;

    fn unit_model(levels: usize) -> VariableModel {
        let m = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap()).unwrap();
        VariableModel::new(HistogramSequence::universal(0.5, 0.25, levels, &m).unwrap(), m)
    }

    fn report(x: &str, y: &str, log_bf: f64) -> PairEntry {
        PairEntry {
            x: x.into(),
            y: y.into(),
            report: PairReport {
                log_gx: 0.0,
                log_gy: 0.0,
                log_gxy: 0.0,
                log_bayes_factor: log_bf,
                mi_per_sample: 0.0,
                decision: if log_bf >= 0.0 { Decision::Independent } else { Decision::Dependent },
                prior_p: 0.5,
            },
        }
    }

    #[test]
    fn product_weights_sum_below_one() {
        let w = GridWeights::product(&LevelWeights::default_for(8), &LevelWeights::default_for(8));
        assert!((w.total() - (9.0f64 / 10.0).powi(2)).abs() < 1e-14);
        assert!(GridWeights::new(2, 2, vec![0.3; 4]).is_err());
        assert!(GridWeights::new(2, 2, vec![0.1; 3]).is_err());
    }

    #[test]
    fn single_cell_joint_model() {
        let m = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap()).unwrap();
        let p = HistogramSequence::universal(0.5, 0.25, 0, &m).unwrap();
        let mut j = JointEstimator::new(p.clone(), p, &m, &m, GridWeights::new(1, 1, vec![1.0]).unwrap()).unwrap();
        assert_eq!(j.grid_state(0, 0).unwrap().alphabet_size(), 1);
        assert_eq!(j.observe(0.3, 0.9).unwrap(), 0.0);
    }

    #[test]
    fn grid_shape_mismatch() {
        let c = PairConfig { x: unit_model(2), y: unit_model(3), prior_p: 0.5 };
        let w = GridWeights::product(&LevelWeights::default_for(2), &LevelWeights::default_for(2));
        let err = JointEstimator::new(c.x.partition, c.y.partition, &c.x.measure, &c.y.measure, w);
        assert!(matches!(err, Err(Error::WeightCountMismatch { .. })));
    }

    #[test]
    fn uniform_first_pair_has_density_one() {
        let c = PairConfig { x: unit_model(2), y: unit_model(2), prior_p: 0.5 };
        let mut j = c.joint_estimator().unwrap();
        assert!(j.observe(0.1, 0.7).unwrap().abs() < 1e-14);
    }

    #[test]
    fn unbounded_corner_is_dead() {
        let m = ReferenceMeasure::lebesgue_real_line();
        let model = VariableModel::new(HistogramSequence::universal(0.0, 1.0, 3, &m).unwrap(), m);
        let c = PairConfig { x: model.clone(), y: model, prior_p: 0.5 };
        let mut j = c.joint_estimator().unwrap();
        j.observe(0.2, -0.3).unwrap();
        assert_eq!(j.grid_log_density(0, 0), Some(f64::NEG_INFINITY));
        assert_eq!(j.grid_log_density(0, 2), Some(f64::NEG_INFINITY));
        assert!(j.grid_log_density(2, 2).unwrap().is_finite());
    }

    #[test]
    fn analyze_pair_preconditions() {
        let c = PairConfig { x: unit_model(2), y: unit_model(2), prior_p: 0.5 };
        assert_eq!(analyze_pair(&[0.1], &[0.1, 0.2], &c), Err(Error::LengthMismatch(1, 2)));
        assert_eq!(analyze_pair(&[], &[], &c), Err(Error::EmptySample));
        let bad = PairConfig { prior_p: 1.0, ..c };
        assert_eq!(analyze_pair(&[0.1], &[0.1], &bad), Err(Error::InvalidPrior(1.0)));
    }

    #[test]
    fn tie_decides_independent() {
        let r = PairReport::from_log_densities(-1.0, -2.0, -3.0, 4, 0.5).unwrap();
        assert_eq!(r.log_bayes_factor, 0.0);
        assert_eq!(r.decision, Decision::Independent);
        assert_eq!(r.mi_per_sample, 0.0);
    }

    #[test]
    fn report_json_field_names() {
        let r = PairReport::from_log_densities(-1.0, -2.0, -1.0, 2, 0.5).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["log_gx", "log_gy", "log_gxy", "log_bayes_factor", "mi_per_sample", "decision", "prior_p"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["decision"], "dependent");
    }

    #[test]
    fn forest_edge_cases() {
        assert!(build_forest(&[]).is_empty());
        let all_indep = [report("a", "b", 2.0), report("a", "c", 0.0), report("b", "c", 5.0)];
        assert!(build_forest(&all_indep).is_empty());
    }

    #[test]
    fn forest_skips_cycles_and_orders_edges() {
        let pairs = [
            report("b", "a", -10.0),
            report("a", "c", -8.0),
            report("b", "c", -9.0),
            report("c", "d", -1.0),
            report("a", "d", 3.0),
        ];
        let forest = build_forest(&pairs);
        let names: Vec<(&str, &str)> = forest.iter().map(|e| (e.x.as_str(), e.y.as_str())).collect();
        assert_eq!(names, vec![("a", "b"), ("b", "c"), ("c", "d")]);
        assert_eq!(forest[0].weight, 10.0);
    }

    #[test]
    fn forest_tie_break_by_names() {
        let pairs = [report("c", "d", -1.0), report("a", "b", -1.0), report("b", "c", -1.0), report("a", "c", -1.0)];
        let forest = build_forest(&pairs);
        let names: Vec<(&str, &str)> = forest.iter().map(|e| (e.x.as_str(), e.y.as_str())).collect();
        assert_eq!(names, vec![("a", "b"), ("a", "c"), ("c", "d")]);
    }
}

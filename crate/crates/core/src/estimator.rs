//! Univariate level-mixture density estimator.
//!
//! At level `k` the sample `yⁿ` is mapped to cells `b₁ … bₙ` and scored by
//!
//! ```text
//! g_k(yⁿ) = Q_k(b₁ … bₙ) / (η(b₁) ⋯ η(bₙ))
//! ```
//!
//! where `Q_k` is a KT estimator over the cells of level `k`. The estimate is
//! the mixture `g(yⁿ) = Σ_k w_k g_k(yⁿ)`. It integrates to at most `Σ w_k ≤ 1`
//! against `ηⁿ`, so `−log₂ g` is a codelength relative to `η`.
//!
//! A cell of infinite reference measure gives its level density zero from
//! then on; the level stays in the mixture with weight but contributes
//! nothing.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kt::KtState;
use crate::measure::ReferenceMeasure;
use crate::numeric::log_sum_exp;
use crate::partition::HistogramSequence;

/// Positive level weights with total at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelWeights(Vec<f64>);

impl LevelWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total} > 1")));
        }
        Ok(Self(weights))
    }

    /// `w_k = 1/((k+1)(k+2))` for `k = 0..=max_level`; sums to `1 − 1/(K+2)`.
    pub fn default_for(max_level: usize) -> Self {
        Self((0..=max_level).map(|k| 1.0 / ((k as f64 + 1.0) * (k as f64 + 2.0))).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone)]
struct LevelTrack {
    kt: KtState,
    /// `ln η(cell)` per cell of the level; `+inf` for unbounded cells.
    log_measure: Arc<[f64]>,
    log_density: f64,
}

/// The mixture `Σ_k w_k g_k` over one [`HistogramSequence`].
#[derive(Debug, Clone)]
pub struct MixtureEstimator {
    partition: HistogramSequence,
    measure: ReferenceMeasure,
    log_weights: Vec<f64>,
    levels: Vec<LevelTrack>,
    n: u64,
    cells: Vec<usize>,
}

/// Per-level cell log-measures of `measure` on the cells of `partition`.
pub(crate) fn level_log_measures(
    partition: &HistogramSequence,
    measure: &ReferenceMeasure,
) -> Result<Vec<Vec<f64>>> {
    (0..=partition.max_level())
        .map(|k| {
            partition
                .cells(k)?
                .iter()
                .map(|cell| {
                    let eta = measure.measure_of(cell);
                    if eta > 0.0 {
                        Ok(eta.ln())
                    } else {
                        Err(Error::IncompatibleMeasure(format!(
                            "cell {cell} of level {k} has reference measure {eta}"
                        )))
                    }
                })
                .collect()
        })
        .collect()
}

impl MixtureEstimator {
    pub fn new(
        partition: HistogramSequence,
        measure: ReferenceMeasure,
        weights: LevelWeights,
    ) -> Result<Self> {
        let expected = partition.max_level() + 1;
        if weights.len() != expected {
            return Err(Error::WeightCountMismatch { expected, got: weights.len() });
        }
        let levels = level_log_measures(&partition, &measure)?
            .into_iter()
            .map(|log_measure| {
                Ok(LevelTrack {
                    kt: KtState::new(log_measure.len() as u64)?,
                    log_measure: log_measure.into(),
                    log_density: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            log_weights: weights.as_slice().iter().map(|w| w.ln()).collect(),
            partition,
            measure,
            levels,
            n: 0,
            cells: Vec::with_capacity(expected),
        })
    }

    /// Default weights over the levels of `partition`.
    pub fn with_default_weights(partition: HistogramSequence, measure: ReferenceMeasure) -> Result<Self> {
        let weights = LevelWeights::default_for(partition.max_level());
        Self::new(partition, measure, weights)
    }

    pub fn partition(&self) -> &HistogramSequence {
        &self.partition
    }

    pub fn measure(&self) -> &ReferenceMeasure {
        &self.measure
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// `ln g(yⁿ)`.
    pub fn log_density(&self) -> f64 {
        log_sum_exp(self.weighted_terms())
    }

    fn weighted_terms(&self) -> impl Iterator<Item = f64> + Clone + '_ {
        self.log_weights.iter().zip(&self.levels).map(|(lw, l)| lw + l.log_density)
    }

    /// `ln g_k(yⁿ)` for every level, `-inf` for dead levels.
    pub fn level_log_densities(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.log_density).collect()
    }

    pub fn level_state(&self, k: usize) -> Option<&KtState> {
        self.levels.get(k).map(|l| &l.kt)
    }

    /// Adds `y` and returns `ln g(yⁿ⁺¹) − ln g(yⁿ)`. When every level is
    /// already dead the increment is `-inf`. Out-of-support values leave the
    /// estimator untouched.
    pub fn observe(&mut self, y: f64) -> Result<f64> {
        let mut cells = std::mem::take(&mut self.cells);
        let located = self.partition.locate_all(y, &mut cells);
        if let Err(e) = located {
            self.cells = cells;
            return Err(e);
        }
        let before = self.log_density();
        for (level, &cell) in self.levels.iter_mut().zip(&cells) {
            let log_kt = level.kt.observe_unchecked(cell as u64);
            level.log_density += log_kt - level.log_measure[cell];
        }
        self.cells = cells;
        self.n += 1;
        let after = self.log_density();
        Ok(if after == f64::NEG_INFINITY { f64::NEG_INFINITY } else { after - before })
    }

    pub fn observe_all(&mut self, ys: &[f64]) -> Result<()> {
        for &y in ys {
            self.observe(y)?;
        }
        Ok(())
    }

    /// One-step predictive density at `y`, without updating.
    pub fn density_at(&self, y: f64) -> Result<f64> {
        Ok(self.log_predictive(y)?.exp())
    }

    /// Natural log of [`density_at`](Self::density_at).
    pub fn log_predictive(&self, y: f64) -> Result<f64> {
        let mut cells = Vec::with_capacity(self.levels.len());
        self.partition.locate_all(y, &mut cells)?;
        let before = self.log_density();
        if before == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let after = log_sum_exp(self.log_weights.iter().zip(&self.levels).zip(&cells).map(
            |((lw, level), &cell)| {
                lw + level.log_density + level.kt.predictive_unchecked(cell as u64).ln()
                    - level.log_measure[cell]
            },
        ));
        Ok(after - before)
    }

    /// `−log₂ g(yⁿ)`. May be negative for continuous data (a differential
    /// codelength); `+inf` when every level is dead.
    pub fn codelength_bits(&self) -> f64 {
        -self.log_density() / std::f64::consts::LN_2
    }

    /// Posterior weight of each level, `w_k g_k / g`.
    pub fn level_posterior(&self) -> Result<Vec<f64>> {
        let top = self.weighted_terms().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::DegenerateMixture);
        }
        let scaled: Vec<f64> = self.weighted_terms().map(|t| (t - top).exp()).collect();
        let norm: f64 = scaled.iter().sum();
        Ok(scaled.into_iter().map(|s| s / norm).collect())
    }

    /// Serializable snapshot of the per-level statistics.
    pub fn export_state(&self) -> EstimatorState {
        EstimatorState {
            n: self.n,
            log_density: self.log_density(),
            codelength_bits: self.codelength_bits(),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(k, l)| LevelSnapshot {
                    level: k,
                    cells: l.log_measure.len(),
                    log_weight: self.log_weights[k],
                    log_kt: l.kt.log_prob(),
                    log_density: l.log_density,
                    counts: l.kt.counts(),
                })
                .collect(),
        }
    }
}

/// JSON-friendly estimator snapshot. Logs are natural; infinities are
/// written as `"inf"` / `"-inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorState {
    pub n: u64,
    #[serde(with = "crate::ext_float")]
    pub log_density: f64,
    #[serde(with = "crate::ext_float")]
    pub codelength_bits: f64,
    pub levels: Vec<LevelSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSnapshot {
    pub level: usize,
    pub cells: usize,
    pub log_weight: f64,
    #[serde(with = "crate::ext_float")]
    pub log_kt: f64,
    #[serde(with = "crate::ext_float")]
    pub log_density: f64,
    /// `(cell index, count)` pairs with nonzero count.
    pub counts: Vec<(u64, u64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{CountingMeasure, Interval};

    fn unit_interval() -> ReferenceMeasure {
        ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap()).unwrap()
    }

    fn uniform_setup(k: usize) -> MixtureEstimator {
        let m = unit_interval();
        let p = HistogramSequence::universal(0.5, 0.25, k, &m).unwrap();
        MixtureEstimator::with_default_weights(p, m).unwrap()
    }

    #[test]
    fn default_weight_total() {
        let w = LevelWeights::default_for(16);
        assert!((w.total() - 17.0 / 18.0).abs() < 1e-15);
        assert!(LevelWeights::new(vec![0.5, 0.6]).is_err());
        assert!(LevelWeights::new(vec![0.5, 0.0]).is_err());
        assert!(LevelWeights::new(vec![]).is_err());
    }

    #[test]
    fn fresh_estimator_density() {
        let est = MixtureEstimator::with_default_weights(
            HistogramSequence::universal(0.0, 1.0, 16, &ReferenceMeasure::lebesgue_real_line()).unwrap(),
            ReferenceMeasure::lebesgue_real_line(),
        )
        .unwrap();
        assert!((est.log_density() - (17.0f64 / 18.0).ln()).abs() < 1e-15);
        assert!((est.codelength_bits() + (17.0f64 / 18.0).log2()).abs() < 1e-14);
        let post = est.level_posterior().unwrap();
        let w = LevelWeights::default_for(16);
        for (p, wk) in post.iter().zip(w.as_slice()) {
            assert!((p - wk / w.total()).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_length_mismatch() {
        let m = unit_interval();
        let p = HistogramSequence::universal(0.5, 0.25, 3, &m).unwrap();
        let err = MixtureEstimator::new(p, m, LevelWeights::default_for(2)).unwrap_err();
        assert_eq!(err, Error::WeightCountMismatch { expected: 4, got: 3 });
    }

    #[test]
    fn single_cell_model() {
        let m = unit_interval();
        let p = HistogramSequence::universal(0.5, 0.25, 0, &m).unwrap();
        let mut est = MixtureEstimator::new(p, m, LevelWeights::new(vec![1.0]).unwrap()).unwrap();
        for y in [0.1, 0.9, 0.3] {
            assert!(est.observe(y).unwrap().abs() < 1e-15);
        }
        assert!(est.log_density().abs() < 1e-15);
    }

    #[test]
    fn first_observation_on_equal_width_levels_has_density_one() {
        // Levels 0..=2 of [0, 1) with center 0.5 / scale 0.25 are equal-width.
        for y in [0.0, 0.1, 0.25, 0.5, 0.6, 0.99] {
            let mut est = uniform_setup(2);
            assert!((est.density_at(y).unwrap() - 1.0).abs() < 1e-14);
            assert!(est.observe(y).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn real_line_contributions() {
        let m = ReferenceMeasure::lebesgue_real_line();
        let p = HistogramSequence::universal(0.0, 1.0, 4, &m).unwrap();
        let mut est = MixtureEstimator::with_default_weights(p, m).unwrap();
        est.observe(0.3).unwrap();
        let levels = est.level_log_densities();
        assert_eq!(levels[0], f64::NEG_INFINITY);
        assert_eq!(levels[1], f64::NEG_INFINITY);
        assert!((levels[2] - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn out_of_support_is_rejected_without_mutation() {
        let mut est = uniform_setup(3);
        est.observe(0.2).unwrap();
        let before = est.log_density();
        assert!(matches!(est.observe(1.5), Err(Error::OutOfSupport(_))));
        assert!(est.density_at(-0.1).is_err());
        assert_eq!(est.n(), 1);
        assert_eq!(est.log_density(), before);
    }

    #[test]
    fn discrete_codelength_is_nonnegative() {
        let m = ReferenceMeasure::integers();
        let p = HistogramSequence::universal(1.0, 1.0, 8, &m).unwrap();
        let mut est = MixtureEstimator::with_default_weights(p, m).unwrap();
        for y in [0.0, 1.0, 1.0, 2.0, 1.0, 3.0, 0.0] {
            est.observe(y).unwrap();
            assert!(est.codelength_bits() >= 0.0);
        }
    }

    #[test]
    fn harmonic_measure_is_supported() {
        let m = ReferenceMeasure::counting(CountingMeasure::harmonic_naturals());
        let p = HistogramSequence::universal(1.0, 1.0, 6, &m).unwrap();
        let mut est = MixtureEstimator::with_default_weights(p, m).unwrap();
        est.observe_all(&[1.0, 2.0, 1.0, 7.0]).unwrap();
        assert!(est.log_density().is_finite());
        assert!(est.observe(0.0).is_err());
    }

    #[test]
    fn incompatible_measure_is_rejected() {
        // Partition over ℝ, measure only on [0, 1): outer cells have η = 0.
        let p = HistogramSequence::universal(0.0, 1.0, 3, &ReferenceMeasure::lebesgue_real_line()).unwrap();
        assert!(matches!(
            MixtureEstimator::with_default_weights(p, unit_interval()),
            Err(Error::IncompatibleMeasure(_))
        ));
    }

    #[test]
    fn dead_mixture() {
        let m = ReferenceMeasure::lebesgue_real_line();
        let p = HistogramSequence::universal(0.0, 1.0, 2, &m).unwrap();
        let mut est = MixtureEstimator::with_default_weights(p, m).unwrap();
        assert_eq!(est.observe(50.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(est.codelength_bits(), f64::INFINITY);
        assert_eq!(est.level_posterior(), Err(Error::DegenerateMixture));
        assert_eq!(est.density_at(0.0).unwrap(), 0.0);
    }

    #[test]
    fn state_export_serializes_infinities() {
        let m = ReferenceMeasure::lebesgue_real_line();
        let p = HistogramSequence::universal(0.0, 1.0, 3, &m).unwrap();
        let mut est = MixtureEstimator::with_default_weights(p, m).unwrap();
        est.observe_all(&[0.1, -0.4, 0.7]).unwrap();
        let state = est.export_state();
        assert_eq!(state.n, 3);
        assert_eq!(state.levels[3].counts.iter().map(|c| c.1).sum::<u64>(), 3);
        let json = serde_json::to_string(&state).unwrap();
        assert!(json.contains("\"-inf\""));
        let back: EstimatorState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, state);
    }
}

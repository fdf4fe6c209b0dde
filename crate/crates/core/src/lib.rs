//! Universal Bayesian measures for real-valued data.
//!
//! A sample that is discrete, continuous, or a mixture of both always has a
//! density with respect to a suitable σ-finite reference measure (Lebesgue,
//! weighted counting, or their sum). This crate estimates that density
//! universally: every level of a refining histogram sequence gets its own
//! Krichevsky–Trofimov (KT) estimator over the cells of that level, the
//! per-level cell probabilities are divided by the reference measure of the
//! cells, and the levels are mixed with fixed positive weights.
//!
//! The resulting mixture is a sub-probability density, so `-log2` of it is a
//! valid codelength. Comparing the codelength of a joint model against the sum
//! of the marginal codelengths gives a Bayes factor for independence, which in
//! turn drives a Chow–Liu style dependency forest.
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`measure`] | [`Interval`], [`ReferenceMeasure`] and exact cell measures |
//! | [`partition`] | [`HistogramSequence`]: the refining cut-point family and cell lookup |
//! | [`kt`] | [`KtState`]: sequential KT probability assignment in log domain |
//! | [`estimator`] | [`MixtureEstimator`]: the univariate level mixture |
//! | [`joint`] | [`JointEstimator`], [`analyze_pair`], [`build_forest`] |
//!
//! All probabilities are handled as natural logarithms; conversion to bits
//! happens only where codelengths are reported.

pub mod error;
pub mod estimator;
pub mod ext_float;
pub mod joint;
pub mod kt;
pub mod measure;
mod numeric;
pub mod partition;

pub use error::{Error, Result};
pub use estimator::{EstimatorState, LevelWeights, MixtureEstimator};
pub use joint::{
    analyze_pair, build_forest, Decision, ForestEdge, GridWeights, JointEstimator, PairConfig,
    PairEntry, PairReport, VariableModel,
};
pub use kt::{kt_log_prob_closed_form, KtState};
pub use measure::{AtomRule, CountingMeasure, IntegerDomain, Interval, ReferenceMeasure};
pub use partition::{universal_cut_points, HistogramSequence};

//! Column kinds and the reference measure each one gets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use unimeasure::{CountingMeasure, HistogramSequence, ReferenceMeasure, VariableModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Discrete,
    Continuous,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub measure: ReferenceMeasure,
    pub center: f64,
    pub scale: f64,
}

/// Share of rows above which a repeated value counts as an atom.
const ATOM_SHARE: f64 = 0.05;

fn counts(values: &[f64]) -> HashMap<u64, usize> {
    let mut m = HashMap::new();
    for &v in values {
        // Fold -0.0 into 0.0.
        *m.entry((v + 0.0).to_bits()).or_insert(0) += 1;
    }
    m
}

/// Values occurring in more than 5% of rows, ascending.
pub fn atoms(values: &[f64]) -> Vec<f64> {
    let threshold = ATOM_SHARE * values.len() as f64;
    let mut out: Vec<f64> = counts(values)
        .into_iter()
        .filter(|&(_, c)| c >= 2 && c as f64 > threshold)
        .map(|(b, _)| f64::from_bits(b))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn infer_column_kind(values: &[f64]) -> ColumnKind {
    let n = values.len();
    let distinct = counts(values).len();
    let integral = values.iter().all(|v| v.fract() == 0.0);
    if integral && distinct as f64 <= (20f64).max((n as f64).sqrt()) {
        return ColumnKind::Discrete;
    }
    let atoms = atoms(values);
    if atoms.is_empty() {
        return ColumnKind::Continuous;
    }
    let rest_non_integer = values
        .iter()
        .filter(|v| atoms.binary_search_by(|a| a.total_cmp(&(**v + 0.0))).is_err())
        .all(|v| v.fract() != 0.0);
    if rest_non_integer {
        ColumnKind::Mixed
    } else {
        ColumnKind::Continuous
    }
}

/// Sample mean and standard deviation, with scale 1 for constant or
/// single-value columns.
pub fn center_scale(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 1.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    (mean, if sd.is_finite() && sd > 0.0 { sd } else { 1.0 })
}

pub fn infer_schema(name: &str, values: &[f64]) -> ColumnSchema {
    let kind = infer_column_kind(values);
    let measure = match kind {
        ColumnKind::Discrete => ReferenceMeasure::integers(),
        ColumnKind::Continuous => ReferenceMeasure::lebesgue_real_line(),
        ColumnKind::Mixed => ReferenceMeasure::lebesgue_real_line().sum(ReferenceMeasure::counting(
            CountingMeasure::unit_atoms(&atoms(values)).expect("atoms are distinct and finite"),
        )),
    };
    let (center, scale) = center_scale(values);
    ColumnSchema { name: name.to_string(), kind, measure, center, scale }
}

impl ColumnSchema {
    /// Checks that the measure variant agrees with the kind and the
    /// histogram parameters are usable.
    pub fn validate(&self) -> Result<(), String> {
        let ok = matches!(
            (self.kind, &self.measure),
            (ColumnKind::Discrete, ReferenceMeasure::Counting(_))
                | (ColumnKind::Continuous, ReferenceMeasure::Lebesgue(_))
                | (ColumnKind::Mixed, ReferenceMeasure::Sum(_))
        );
        if !ok {
            return Err(format!("column {:?}: measure does not match kind {:?}", self.name, self.kind));
        }
        if !self.center.is_finite() || !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(format!("column {:?}: center must be finite and scale positive", self.name));
        }
        Ok(())
    }

    pub fn model(&self, levels: usize) -> unimeasure::Result<VariableModel> {
        let seq = HistogramSequence::universal(self.center, self.scale, levels, &self.measure)?;
        Ok(VariableModel::new(seq, self.measure.clone()))
    }
}

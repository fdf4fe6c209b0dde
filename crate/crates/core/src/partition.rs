//! Refining histogram sequences.
//!
//! The universal sequence is parameterised by a center `μ` and a scale `σ`.
//! Level 0 is the whole line, level 1 cuts at `μ`, and level `k + 1` keeps
//! every cut of level `k`, inserts the midpoint of each pair of neighbouring
//! cuts, and adds the two new extremes `μ ± kσ`. Level `k` therefore has
//! `2^k − 1` cuts and `2^k` half-open cells `(−∞, c₁], (c₁, c₂], …, (c_last, ∞)`.
//!
//! Cells are intersected with the support of a reference measure. Cells that
//! contain no support point are dropped. A cell that contains support points
//! but has zero reference measure (only possible for the closed left end of
//! a Lebesgue support, e.g. `(−∞, 0] ∩ [0, 1) = {0}`) is folded into the next
//! kept cell, so every support point still maps to a cell of positive measure.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{Interval, ReferenceMeasure};

/// Deepest level a sequence may materialise.
pub const MAX_LEVEL: usize = 24;

const DROPPED: u32 = u32::MAX;

/// How the cut points were produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutScheme {
    Universal { center: f64, scale: f64 },
    Custom,
}

#[derive(Debug, Clone)]
struct Level {
    cuts: Vec<f64>,
    /// Raw cell index (position among `cuts.len() + 1` half-open cells) to
    /// kept cell index, or `DROPPED`.
    raw_to_cell: Vec<u32>,
    cells: Vec<Interval>,
}

/// A refining partition family `{B_k}` restricted to a support.
#[derive(Debug, Clone)]
pub struct HistogramSequence {
    scheme: CutScheme,
    support: ReferenceMeasure,
    levels: Arc<[Level]>,
}

/// Cut points of levels `1..=max_level` of the universal sequence.
pub fn universal_cut_points(center: f64, scale: f64, max_level: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(max_level);
    if max_level == 0 {
        return out;
    }
    out.push(vec![center]);
    for k in 1..max_level {
        let prev = &out[k - 1];
        let mut next = Vec::with_capacity(2 * prev.len() + 1);
        next.push(center - k as f64 * scale);
        for (j, &c) in prev.iter().enumerate() {
            next.push(c);
            if let Some(&d) = prev.get(j + 1) {
                next.push((c + d) / 2.0);
            }
        }
        next.push(center + k as f64 * scale);
        out.push(next);
    }
    out
}

impl HistogramSequence {
    /// The universal sequence with the given center and scale, truncated at
    /// `max_level`, on the support of `support`.
    pub fn universal(
        center: f64,
        scale: f64,
        max_level: usize,
        support: &ReferenceMeasure,
    ) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidPartition(format!("center {center} is not finite")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidPartition(format!("scale {scale} must be positive")));
        }
        check_depth(max_level)?;
        let cuts = universal_cut_points(center, scale, max_level);
        Self::build(CutScheme::Universal { center, scale }, cuts, support)
    }

    /// A user-supplied family: `cut_levels[k - 1]` holds the cuts of level
    /// `k`. Rejected unless every level refines the previous one.
    pub fn custom(cut_levels: Vec<Vec<f64>>, support: &ReferenceMeasure) -> Result<Self> {
        check_depth(cut_levels.len())?;
        let seq = Self::build(CutScheme::Custom, cut_levels, support)?;
        if !seq.verify_refinement() {
            return Err(Error::InvalidPartition("levels do not refine one another".into()));
        }
        Ok(seq)
    }

    /// The dyadic sequence on `[0, 1)`: level `k` cuts at `i / 2^k`.
    pub fn dyadic_unit(max_level: usize) -> Result<Self> {
        let support = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0)?)?;
        let cuts = (1..=max_level)
            .map(|k| {
                let n = 1u64 << k;
                (1..n).map(|i| i as f64 / n as f64).collect()
            })
            .collect();
        Self::custom(cuts, &support)
    }

    fn build(scheme: CutScheme, cut_levels: Vec<Vec<f64>>, support: &ReferenceMeasure) -> Result<Self> {
        let hull = support
            .hull()
            .ok_or_else(|| Error::InvalidPartition("support is empty".into()))?;
        let mut levels = Vec::with_capacity(cut_levels.len() + 1);
        levels.push(Level::new(Vec::new(), support, &hull, 0)?);
        for (i, cuts) in cut_levels.into_iter().enumerate() {
            levels.push(Level::new(cuts, support, &hull, i + 1)?);
        }
        Ok(Self { scheme, support: support.clone(), levels: levels.into() })
    }

    pub fn scheme(&self) -> CutScheme {
        self.scheme
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn support(&self) -> &ReferenceMeasure {
        &self.support
    }

    fn level(&self, k: usize, min: usize) -> Result<&Level> {
        if k < min || k > self.max_level() {
            return Err(Error::LevelOutOfRange { level: k, min, max: self.max_level() });
        }
        Ok(&self.levels[k])
    }

    /// Cut points of level `k`, `1 ≤ k ≤ max_level`.
    pub fn cut_points(&self, k: usize) -> Result<&[f64]> {
        Ok(&self.level(k, 1)?.cuts)
    }

    /// Kept cells of level `k`, left to right.
    pub fn cells(&self, k: usize) -> Result<&[Interval]> {
        Ok(&self.level(k, 0)?.cells)
    }

    pub fn cell_count(&self, k: usize) -> Result<usize> {
        Ok(self.level(k, 0)?.cells.len())
    }

    /// Index into `cells(k)` of the cell holding `y`.
    pub fn cell_of(&self, k: usize, y: f64) -> Result<usize> {
        let level = self.level(k, 0)?;
        if !self.support.contains(y) {
            return Err(Error::OutOfSupport(y));
        }
        level.locate(y).ok_or(Error::OutOfSupport(y))
    }

    /// Cell indices of `y` at every level `0..=max_level`, written into `out`.
    pub(crate) fn locate_all(&self, y: f64, out: &mut Vec<usize>) -> Result<()> {
        if !self.support.contains(y) {
            return Err(Error::OutOfSupport(y));
        }
        out.clear();
        for level in self.levels.iter() {
            out.push(level.locate(y).ok_or(Error::OutOfSupport(y))?);
        }
        Ok(())
    }

    /// True iff every cell of level `k + 1` lies inside a single cell of
    /// level `k`, for all `k < max_level`.
    pub fn verify_refinement(&self) -> bool {
        self.levels.windows(2).all(|pair| {
            let (parents, children) = (&pair[0].cells, &pair[1].cells);
            let mut p = 0;
            children.iter().all(|child| {
                while p < parents.len() && !child.is_subset_of(&parents[p]) {
                    p += 1;
                }
                p < parents.len()
            })
        })
    }
}

fn check_depth(max_level: usize) -> Result<()> {
    if max_level > MAX_LEVEL {
        return Err(Error::InvalidPartition(format!(
            "max_level {max_level} exceeds the supported depth {MAX_LEVEL}"
        )));
    }
    Ok(())
}

enum Piece {
    Empty,
    Null(Interval),
    Kept(Interval),
}

impl Level {
    fn new(cuts: Vec<f64>, support: &ReferenceMeasure, hull: &Interval, k: usize) -> Result<Self> {
        if cuts.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPartition(format!("level {k} has a non-finite cut point")));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "cut points of level {k} are not strictly increasing"
            )));
        }
        let raw_count = cuts.len() + 1;
        let mut raw_to_cell = vec![DROPPED; raw_count];
        let mut cells: Vec<Interval> = Vec::new();
        let mut pending: Vec<(usize, Interval)> = Vec::new();

        for raw in 0..raw_count {
            let lower = if raw == 0 { f64::NEG_INFINITY } else { cuts[raw - 1] };
            let upper = cuts.get(raw).copied().unwrap_or(f64::INFINITY);
            let piece = match Interval::open_closed(lower, upper)?.intersect(hull) {
                Some(clipped) if support.meets(&clipped) => {
                    if support.measure_of(&clipped) > 0.0 {
                        Piece::Kept(clipped)
                    } else {
                        Piece::Null(clipped)
                    }
                }
                _ => Piece::Empty,
            };
            match piece {
                Piece::Empty => {}
                Piece::Null(i) => pending.push((raw, i)),
                Piece::Kept(i) => {
                    let idx = cells.len() as u32;
                    let merged = pending.first().map_or(i, |(_, first)| first.hull(&i));
                    for (r, _) in pending.drain(..) {
                        raw_to_cell[r] = idx;
                    }
                    raw_to_cell[raw] = idx;
                    cells.push(merged);
                }
            }
        }
        if !pending.is_empty() {
            let last = cells.len().checked_sub(1).ok_or_else(|| {
                Error::InvalidPartition("support has zero reference measure".into())
            })?;
            for (r, i) in pending.drain(..) {
                raw_to_cell[r] = last as u32;
                cells[last] = cells[last].hull(&i);
            }
        }
        Ok(Self { cuts, raw_to_cell, cells })
    }

    fn locate(&self, y: f64) -> Option<usize> {
        // Right-closed cells: y belongs to the first cell whose upper cut is ≥ y.
        let raw = self.cuts.partition_point(|&c| c < y);
        match self.raw_to_cell[raw] {
            DROPPED => None,
            idx => Some(idx as usize),
        }
    }
}

//! Reference measures and the intervals they are evaluated on.
//!
//! A [`ReferenceMeasure`] is one of
//!
//! * Lebesgue measure restricted to an interval support,
//! * a weighted counting measure on a finite atom list or on a rule-generated
//!   integer lattice (`ℤ` or `ℕ = {1, 2, …}`),
//! * a finite sum of the two.
//!
//! [`ReferenceMeasure::measure_of`] is exact for every variant: rule-generated
//! lattices use closed-form range sums, never truncated summation. Results are
//! extended reals, so an unbounded cell under Lebesgue or unit counting
//! measure is `f64::INFINITY`, not an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An interval of the extended real line with explicit endpoint closedness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    lower: f64,
    upper: f64,
    lower_closed: bool,
    upper_closed: bool,
}

impl Interval {
    /// Builds an interval. A degenerate interval must be a closed point, and
    /// infinite endpoints are never closed.
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval(format!(
                "bounds ({lower}, {upper}) leave no real points"
            )));
        }
        if lower > upper {
            return Err(Error::InvalidInterval(format!("lower {lower} exceeds upper {upper}")));
        }
        if (lower_closed && lower.is_infinite()) || (upper_closed && upper.is_infinite()) {
            return Err(Error::InvalidInterval("an infinite endpoint cannot be closed".into()));
        }
        if lower == upper && !(lower_closed && upper_closed) {
            return Err(Error::InvalidInterval(format!(
                "degenerate interval at {lower} must be closed on both ends"
            )));
        }
        Ok(Self { lower, upper, lower_closed, upper_closed })
    }

    pub fn real_line() -> Self {
        Self { lower: f64::NEG_INFINITY, upper: f64::INFINITY, lower_closed: false, upper_closed: false }
    }

    /// `(lower, upper]`, the shape of every histogram cell.
    pub fn open_closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, false, upper.is_finite())
    }

    /// `[lower, upper)`
    pub fn closed_open(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, lower.is_finite(), false)
    }

    /// `[lower, upper]`
    pub fn closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, lower.is_finite(), upper.is_finite())
    }

    /// `(lower, upper)`
    pub fn open(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, false, false)
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x, true, true)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    /// Length (Lebesgue measure) of the interval; infinite when unbounded.
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lower_closed { y >= self.lower } else { y > self.lower };
        let below = if self.upper_closed { y <= self.upper } else { y < self.upper };
        above && below
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lower, lower_closed) = match self.lower.partial_cmp(&other.lower)? {
            std::cmp::Ordering::Greater => (self.lower, self.lower_closed),
            std::cmp::Ordering::Less => (other.lower, other.lower_closed),
            std::cmp::Ordering::Equal => (self.lower, self.lower_closed && other.lower_closed),
        };
        let (upper, upper_closed) = match self.upper.partial_cmp(&other.upper)? {
            std::cmp::Ordering::Less => (self.upper, self.upper_closed),
            std::cmp::Ordering::Greater => (other.upper, other.upper_closed),
            std::cmp::Ordering::Equal => (self.upper, self.upper_closed && other.upper_closed),
        };
        if lower < upper || (lower == upper && lower_closed && upper_closed) {
            Some(Interval { lower, upper, lower_closed, upper_closed })
        } else {
            None
        }
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lower_ok = self.lower > other.lower
            || (self.lower == other.lower && (other.lower_closed || !self.lower_closed));
        let upper_ok = self.upper < other.upper
            || (self.upper == other.upper && (other.upper_closed || !self.upper_closed));
        lower_ok && upper_ok
    }

    /// Smallest interval covering `self` and `other`.
    pub fn hull(&self, other: &Interval) -> Interval {
        let (lower, lower_closed) = if self.lower < other.lower {
            (self.lower, self.lower_closed)
        } else if other.lower < self.lower {
            (other.lower, other.lower_closed)
        } else {
            (self.lower, self.lower_closed || other.lower_closed)
        };
        let (upper, upper_closed) = if self.upper > other.upper {
            (self.upper, self.upper_closed)
        } else if other.upper > self.upper {
            (other.upper, other.upper_closed)
        } else {
            (self.upper, self.upper_closed || other.upper_closed)
        };
        Interval { lower, upper, lower_closed, upper_closed }
    }

    /// Smallest and largest integers inside the interval; `None` marks an
    /// unbounded side. Returns `None` overall when no integer is inside.
    fn integer_range(&self) -> Option<(Option<f64>, Option<f64>)> {
        let lo = if self.lower.is_finite() {
            let c = self.lower.ceil();
            Some(if c == self.lower && !self.lower_closed { c + 1.0 } else { c })
        } else {
            None
        };
        let hi = if self.upper.is_finite() {
            let f = self.upper.floor();
            Some(if f == self.upper && !self.upper_closed { f - 1.0 } else { f })
        } else {
            None
        };
        match (lo, hi) {
            (Some(l), Some(h)) if l > h => None,
            _ => Some((lo, hi)),
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lower_closed { '[' } else { '(' },
            self.lower,
            self.upper,
            if self.upper_closed { ']' } else { ')' }
        )
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    /// `null` is −∞.
    lower: Option<f64>,
    /// `null` is +∞.
    upper: Option<f64>,
    #[serde(default)]
    lower_closed: bool,
    #[serde(default)]
    upper_closed: bool,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;

    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(
            r.lower.unwrap_or(f64::NEG_INFINITY),
            r.upper.unwrap_or(f64::INFINITY),
            r.lower_closed,
            r.upper_closed,
        )
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        IntervalRepr {
            lower: i.lower.is_finite().then_some(i.lower),
            upper: i.upper.is_finite().then_some(i.upper),
            lower_closed: i.lower_closed,
            upper_closed: i.upper_closed,
        }
    }
}

/// Weight rule of a lattice counting measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomRule {
    /// Every lattice point has weight 1.
    Unit,
    /// `h ↦ 1/(h(h+1))` on `ℕ`; total mass 1.
    HarmonicTelescoping,
}

/// Lattice carrying a rule-generated counting measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegerDomain {
    /// All of `ℤ`.
    Integers,
    /// `{1, 2, 3, …}`.
    Naturals,
}

#[derive(Debug, Clone, PartialEq)]
enum Atoms {
    /// Sorted, distinct positions with matching positive weights.
    Finite { points: Vec<f64>, weights: Vec<f64> },
    Rule { rule: AtomRule, domain: IntegerDomain },
}

/// Weighted counting measure `η(D) = Σ_{a ∈ D} w(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingMeasure {
    atoms: Atoms,
    scale: f64,
}

impl CountingMeasure {
    /// Finite atom list. Positions are sorted; duplicates are rejected.
    pub fn finite(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut atoms = atoms;
        for &(p, w) in &atoms {
            if !p.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom position {p} is not finite")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {p} has weight {w}; weights must be positive and finite"
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure("duplicate atom positions".into()));
        }
        let (points, weights) = atoms.into_iter().unzip();
        Ok(Self { atoms: Atoms::Finite { points, weights }, scale: 1.0 })
    }

    /// Finite atom list with unit weights.
    pub fn unit_atoms(points: &[f64]) -> Result<Self> {
        Self::finite(points.iter().map(|&p| (p, 1.0)).collect())
    }

    pub fn lattice(rule: AtomRule, domain: IntegerDomain) -> Result<Self> {
        if rule == AtomRule::HarmonicTelescoping && domain != IntegerDomain::Naturals {
            return Err(Error::InvalidMeasure(
                "harmonic-telescoping weights are only defined on the naturals".into(),
            ));
        }
        Ok(Self { atoms: Atoms::Rule { rule, domain }, scale: 1.0 })
    }

    /// Unit weights on `ℤ`.
    pub fn integers() -> Self {
        Self { atoms: Atoms::Rule { rule: AtomRule::Unit, domain: IntegerDomain::Integers }, scale: 1.0 }
    }

    /// `1/(h(h+1))` on `ℕ`.
    pub fn harmonic_naturals() -> Self {
        Self {
            atoms: Atoms::Rule { rule: AtomRule::HarmonicTelescoping, domain: IntegerDomain::Naturals },
            scale: 1.0,
        }
    }

    fn mass(&self, cell: &Interval) -> f64 {
        let raw = match &self.atoms {
            Atoms::Finite { points, weights } => {
                let (start, end) = finite_range(points, cell);
                weights[start..end].iter().sum()
            }
            Atoms::Rule { rule, domain } => match lattice_range(*domain, cell) {
                None => 0.0,
                Some((lo, hi)) => match rule {
                    AtomRule::Unit => match (lo, hi) {
                        (Some(l), Some(h)) => h - l + 1.0,
                        _ => f64::INFINITY,
                    },
                    AtomRule::HarmonicTelescoping => {
                        // Naturals only, so `lo` is always bounded below by 1.
                        let l = lo.unwrap_or(1.0);
                        match hi {
                            // Σ_{h=l}^{u} 1/h − 1/(h+1) = (u−l+1)/(l(u+1))
                            Some(u) => (u - l + 1.0) / (l * (u + 1.0)),
                            None => 1.0 / l,
                        }
                    }
                },
            },
        };
        raw * self.scale
    }

    fn meets(&self, cell: &Interval) -> bool {
        match &self.atoms {
            Atoms::Finite { points, .. } => {
                let (start, end) = finite_range(points, cell);
                start < end
            }
            Atoms::Rule { domain, .. } => lattice_range(*domain, cell).is_some(),
        }
    }

    fn contains(&self, y: f64) -> bool {
        match &self.atoms {
            Atoms::Finite { points, .. } => points.binary_search_by(|p| p.total_cmp(&y)).is_ok(),
            Atoms::Rule { domain, .. } => {
                y.is_finite()
                    && y.fract() == 0.0
                    && (*domain == IntegerDomain::Integers || y >= 1.0)
            }
        }
    }

    fn hull(&self) -> Option<Interval> {
        match &self.atoms {
            Atoms::Finite { points, .. } => {
                let (first, last) = (points.first()?, points.last()?);
                Interval::closed(*first, *last).ok()
            }
            Atoms::Rule { domain: IntegerDomain::Integers, .. } => Some(Interval::real_line()),
            Atoms::Rule { domain: IntegerDomain::Naturals, .. } => {
                Interval::new(1.0, f64::INFINITY, true, false).ok()
            }
        }
    }
}

/// Index range of sorted `points` falling inside `cell`.
fn finite_range(points: &[f64], cell: &Interval) -> (usize, usize) {
    let start = if cell.lower_closed {
        points.partition_point(|&p| p < cell.lower)
    } else {
        points.partition_point(|&p| p <= cell.lower)
    };
    let end = if cell.upper_closed {
        points.partition_point(|&p| p <= cell.upper)
    } else {
        points.partition_point(|&p| p < cell.upper)
    };
    (start, end.max(start))
}

fn lattice_range(domain: IntegerDomain, cell: &Interval) -> Option<(Option<f64>, Option<f64>)> {
    let (lo, hi) = cell.integer_range()?;
    match domain {
        IntegerDomain::Integers => Some((lo, hi)),
        IntegerDomain::Naturals => {
            let lo = lo.map_or(1.0, |l| l.max(1.0));
            match hi {
                Some(h) if h < lo => None,
                _ => Some((Some(lo), hi)),
            }
        }
    }
}

/// Lebesgue measure restricted to an interval with positive length.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueMeasure {
    support: Interval,
    scale: f64,
}

impl LebesgueMeasure {
    pub fn new(support: Interval) -> Result<Self> {
        if support.is_point() {
            return Err(Error::InvalidMeasure(format!(
                "Lebesgue support {support} has zero length"
            )));
        }
        Ok(Self { support, scale: 1.0 })
    }

    pub fn support(&self) -> &Interval {
        &self.support
    }

    fn mass(&self, cell: &Interval) -> f64 {
        match self.support.intersect(cell) {
            Some(i) if !i.is_point() => i.length() * self.scale,
            _ => 0.0,
        }
    }
}

/// A σ-finite reference measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub enum ReferenceMeasure {
    Lebesgue(LebesgueMeasure),
    Counting(CountingMeasure),
    /// Never nested and never empty; the parts are Lebesgue or counting.
    Sum(Vec<ReferenceMeasure>),
}

impl ReferenceMeasure {
    /// Lebesgue measure on `support`.
    pub fn lebesgue(support: Interval) -> Result<Self> {
        Ok(Self::Lebesgue(LebesgueMeasure::new(support)?))
    }

    /// Lebesgue measure on the whole real line.
    pub fn lebesgue_real_line() -> Self {
        Self::Lebesgue(LebesgueMeasure { support: Interval::real_line(), scale: 1.0 })
    }

    pub fn counting(counting: CountingMeasure) -> Self {
        Self::Counting(counting)
    }

    /// Unit counting measure on `ℤ`.
    pub fn integers() -> Self {
        Self::Counting(CountingMeasure::integers())
    }

    /// Sum of `self` and `other`; nested sums are flattened.
    pub fn sum(self, other: ReferenceMeasure) -> ReferenceMeasure {
        let mut parts = self.into_parts();
        parts.extend(other.into_parts());
        ReferenceMeasure::Sum(parts)
    }

    fn into_parts(self) -> Vec<ReferenceMeasure> {
        match self {
            ReferenceMeasure::Sum(parts) => parts,
            other => vec![other],
        }
    }

    /// The measure `c · η`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidMeasure(format!("scale factor {factor} must be positive")));
        }
        Ok(match self {
            ReferenceMeasure::Lebesgue(l) => ReferenceMeasure::Lebesgue(LebesgueMeasure {
                support: l.support,
                scale: l.scale * factor,
            }),
            ReferenceMeasure::Counting(c) => ReferenceMeasure::Counting(CountingMeasure {
                atoms: c.atoms.clone(),
                scale: c.scale * factor,
            }),
            ReferenceMeasure::Sum(parts) => ReferenceMeasure::Sum(
                parts.iter().map(|p| p.scaled(factor)).collect::<Result<_>>()?,
            ),
        })
    }

    /// `η(cell ∩ support)` as an extended nonnegative real.
    pub fn measure_of(&self, cell: &Interval) -> f64 {
        match self {
            ReferenceMeasure::Lebesgue(l) => l.mass(cell),
            ReferenceMeasure::Counting(c) => c.mass(cell),
            ReferenceMeasure::Sum(parts) => parts.iter().map(|p| p.measure_of(cell)).sum(),
        }
    }

    /// Whether any support point lies in `cell`.
    pub fn meets(&self, cell: &Interval) -> bool {
        match self {
            ReferenceMeasure::Lebesgue(l) => l.support.intersect(cell).is_some(),
            ReferenceMeasure::Counting(c) => c.meets(cell),
            ReferenceMeasure::Sum(parts) => parts.iter().any(|p| p.meets(cell)),
        }
    }

    /// Whether `y` lies in the support.
    pub fn contains(&self, y: f64) -> bool {
        match self {
            ReferenceMeasure::Lebesgue(l) => l.support.contains(y),
            ReferenceMeasure::Counting(c) => c.contains(y),
            ReferenceMeasure::Sum(parts) => parts.iter().any(|p| p.contains(y)),
        }
    }

    /// Smallest interval covering the support, `None` for an empty support.
    pub fn hull(&self) -> Option<Interval> {
        match self {
            ReferenceMeasure::Lebesgue(l) => Some(l.support),
            ReferenceMeasure::Counting(c) => c.hull(),
            ReferenceMeasure::Sum(parts) => parts
                .iter()
                .filter_map(|p| p.hull())
                .reduce(|a, b| a.hull(&b)),
        }
    }
}

// Wire format: a record tagged by `variant`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
enum MeasureRepr {
    Lebesgue {
        support: Interval,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Counting {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rule: Option<AtomRule>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<IntegerDomain>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        atoms: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        weights: Vec<f64>,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
    Sum {
        parts: Vec<MeasureRepr>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

fn check_scale(scale: f64) -> Result<f64> {
    if scale.is_finite() && scale > 0.0 {
        Ok(scale)
    } else {
        Err(Error::InvalidMeasure(format!("scale {scale} must be positive and finite")))
    }
}

impl TryFrom<MeasureRepr> for ReferenceMeasure {
    type Error = Error;

    fn try_from(repr: MeasureRepr) -> Result<Self> {
        match repr {
            MeasureRepr::Lebesgue { support, scale } => {
                let mut l = LebesgueMeasure::new(support)?;
                l.scale = check_scale(scale)?;
                Ok(ReferenceMeasure::Lebesgue(l))
            }
            MeasureRepr::Counting { rule, domain, atoms, weights, scale } => {
                let mut c = match rule {
                    Some(rule) => {
                        if !atoms.is_empty() {
                            return Err(Error::InvalidMeasure(
                                "a counting measure takes either a rule or an atom list".into(),
                            ));
                        }
                        let default_domain = match rule {
                            AtomRule::Unit => IntegerDomain::Integers,
                            AtomRule::HarmonicTelescoping => IntegerDomain::Naturals,
                        };
                        CountingMeasure::lattice(rule, domain.unwrap_or(default_domain))?
                    }
                    None => {
                        let weights = if weights.is_empty() { vec![1.0; atoms.len()] } else { weights };
                        if weights.len() != atoms.len() {
                            return Err(Error::InvalidMeasure(format!(
                                "{} atoms but {} weights",
                                atoms.len(),
                                weights.len()
                            )));
                        }
                        CountingMeasure::finite(atoms.into_iter().zip(weights).collect())?
                    }
                };
                c.scale = check_scale(scale)?;
                Ok(ReferenceMeasure::Counting(c))
            }
            MeasureRepr::Sum { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidMeasure("a sum measure needs at least one part".into()));
                }
                let mut flat = Vec::new();
                for p in parts {
                    flat.extend(ReferenceMeasure::try_from(p)?.into_parts());
                }
                Ok(ReferenceMeasure::Sum(flat))
            }
        }
    }
}

impl From<ReferenceMeasure> for MeasureRepr {
    fn from(m: ReferenceMeasure) -> Self {
        match m {
            ReferenceMeasure::Lebesgue(l) => MeasureRepr::Lebesgue { support: l.support, scale: l.scale },
            ReferenceMeasure::Counting(c) => match c.atoms {
                Atoms::Rule { rule, domain } => MeasureRepr::Counting {
                    rule: Some(rule),
                    domain: Some(domain),
                    atoms: Vec::new(),
                    weights: Vec::new(),
                    scale: c.scale,
                },
                Atoms::Finite { points, weights } => MeasureRepr::Counting {
                    rule: None,
                    domain: None,
                    atoms: points,
                    weights,
                    scale: c.scale,
                },
            },
            ReferenceMeasure::Sum(parts) => MeasureRepr::Sum { parts: parts.into_iter().map(Into::into).collect() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oc(a: f64, b: f64) -> Interval {
        Interval::open_closed(a, b).unwrap()
    }

    #[test]
    fn interval_invariants() {
        assert!(Interval::new(1.0, 0.0, false, false).is_err());
        assert!(Interval::new(0.0, 0.0, true, false).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0, true, true).is_err());
        assert!(Interval::new(0.0, f64::NAN, false, false).is_err());
        assert!(Interval::point(2.0).unwrap().contains(2.0));
        let i = oc(0.0, 1.0);
        assert!(!i.contains(0.0) && i.contains(1.0) && i.contains(0.5));
    }

    #[test]
    fn intersection_and_subset() {
        let a = oc(0.0, 1.0);
        let b = Interval::closed_open(0.5, 2.0).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c, Interval::closed(0.5, 1.0).unwrap());
        assert!(c.is_subset_of(&a) && c.is_subset_of(&b));
        assert!(oc(1.0, 2.0).intersect(&a).is_none());
        assert_eq!(
            oc(f64::NEG_INFINITY, 0.0).intersect(&Interval::closed_open(0.0, 1.0).unwrap()),
            Some(Interval::point(0.0).unwrap())
        );
        assert!(!a.is_subset_of(&Interval::open(0.0, 1.0).unwrap()));
    }

    #[test]
    fn lebesgue_unit_interval() {
        let m = ReferenceMeasure::lebesgue_real_line();
        assert_eq!(m.measure_of(&oc(0.0, 1.0)), 1.0);
        assert_eq!(m.measure_of(&oc(f64::NEG_INFINITY, 1.0)), f64::INFINITY);
        let bounded = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(bounded.measure_of(&oc(f64::NEG_INFINITY, 0.0)), 0.0);
        assert_eq!(bounded.measure_of(&oc(0.5, 7.0)), 0.5);
    }

    #[test]
    fn harmonic_tail_is_one_third() {
        let m = ReferenceMeasure::counting(CountingMeasure::harmonic_naturals());
        let tail = Interval::open(2.5, f64::INFINITY).unwrap();
        assert!((m.measure_of(&tail) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.measure_of(&Interval::real_line()) - 1.0).abs() < 1e-15);
        // {2, 3}: 1/6 + 1/12
        assert!((m.measure_of(&oc(1.0, 3.0)) - 0.25).abs() < 1e-15);
        assert_eq!(m.measure_of(&oc(-5.0, 0.5)), 0.0);
    }

    #[test]
    fn harmonic_needs_naturals() {
        assert!(CountingMeasure::lattice(AtomRule::HarmonicTelescoping, IntegerDomain::Integers).is_err());
    }

    #[test]
    fn sum_of_lebesgue_and_integers() {
        let m = ReferenceMeasure::lebesgue_real_line().sum(ReferenceMeasure::integers());
        assert_eq!(m.measure_of(&oc(0.0, 1.0)), 2.0);
        // (0, 1) misses the atom at 1.
        assert_eq!(m.measure_of(&Interval::open(0.0, 1.0).unwrap()), 1.0);
    }

    #[test]
    fn sum_with_empty_counting_is_identity() {
        let base = ReferenceMeasure::lebesgue(Interval::closed(-1.0, 3.0).unwrap()).unwrap();
        let m = base.clone().sum(ReferenceMeasure::counting(CountingMeasure::finite(vec![]).unwrap()));
        for cell in [oc(0.0, 1.0), oc(-2.0, 0.5), oc(2.0, 10.0), Interval::point(1.0).unwrap()] {
            assert_eq!(m.measure_of(&cell), base.measure_of(&cell));
        }
    }

    #[test]
    fn disjoint_atom_sum() {
        let a = ReferenceMeasure::counting(CountingMeasure::finite(vec![(1.0, 0.3)]).unwrap());
        let b = ReferenceMeasure::counting(CountingMeasure::finite(vec![(2.0, 0.4)]).unwrap());
        let m = a.sum(b);
        assert!((m.measure_of(&oc(0.0, 3.0)) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn integer_boundaries_follow_closedness() {
        let z = ReferenceMeasure::integers();
        assert_eq!(z.measure_of(&oc(0.0, 3.0)), 3.0);
        assert_eq!(z.measure_of(&Interval::closed(0.0, 3.0).unwrap()), 4.0);
        assert_eq!(z.measure_of(&Interval::open(0.0, 3.0).unwrap()), 2.0);
        assert_eq!(z.measure_of(&oc(0.2, 0.8)), 0.0);
        assert_eq!(z.measure_of(&oc(-2.5, f64::INFINITY)), f64::INFINITY);
        assert!(z.contains(-4.0) && !z.contains(0.5));
    }

    #[test]
    fn scaling_multiplies() {
        let m = ReferenceMeasure::lebesgue_real_line().sum(ReferenceMeasure::integers());
        let s = m.scaled(10.0).unwrap();
        assert_eq!(s.measure_of(&oc(0.0, 1.0)), 20.0);
        assert!(m.scaled(0.0).is_err());
    }

    #[test]
    fn serde_round_trip_and_rule_names() {
        let m = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap())
            .unwrap()
            .sum(ReferenceMeasure::counting(CountingMeasure::harmonic_naturals()))
            .sum(ReferenceMeasure::counting(CountingMeasure::finite(vec![(0.5, 2.0)]).unwrap()));
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"harmonic-telescoping\""));
        assert!(json.contains("\"variant\":\"sum\""));
        let back: ReferenceMeasure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);

        let unit: ReferenceMeasure =
            serde_json::from_str(r#"{"variant":"counting","rule":"unit"}"#).unwrap();
        assert_eq!(unit, ReferenceMeasure::integers());
        let bad = serde_json::from_str::<ReferenceMeasure>(
            r#"{"variant":"counting","atoms":[1.0],"weights":[-1.0]}"#,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn hulls() {
        let m = ReferenceMeasure::lebesgue(Interval::closed_open(0.0, 1.0).unwrap())
            .unwrap()
            .sum(ReferenceMeasure::counting(CountingMeasure::unit_atoms(&[5.0]).unwrap()));
        assert_eq!(m.hull(), Some(Interval::closed(0.0, 5.0).unwrap()));
        assert!(ReferenceMeasure::counting(CountingMeasure::finite(vec![]).unwrap()).hull().is_none());
    }
}

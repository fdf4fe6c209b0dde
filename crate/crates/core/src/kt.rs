//! Krichevsky–Trofimov sequential probability assignment.
//!
//! For an alphabet of size `m` the predictive probability of symbol `x` after
//! `n` observations with count `c[x]` is `(c[x] + ½) / (n + m/2)`. The product
//! of these factors is the Dirichlet(½, …, ½) mixture over i.i.d. sources,
//! whose closed form is
//!
//! ```text
//! Q(xⁿ) = Γ(m/2) Π_x Γ(c[x] + ½) / ( Γ(n + m/2) Γ(½)^m )
//! ```
//!
//! [`KtState`] accumulates `ln Q` sequentially with compensated summation;
//! [`kt_log_prob_closed_form`] evaluates the Gamma expression independently
//! and exists for cross-checking.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Sequential KT state over `alphabet_size` symbols. Counts are sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct KtState {
    alphabet_size: u64,
    counts: HashMap<u64, u64>,
    total: u64,
    log_prob: CompensatedSum,
}

impl KtState {
    pub fn new(alphabet_size: u64) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self { alphabet_size, counts: HashMap::new(), total: 0, log_prob: CompensatedSum::default() })
    }

    pub fn alphabet_size(&self) -> u64 {
        self.alphabet_size
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, symbol: u64) -> u64 {
        self.counts.get(&symbol).copied().unwrap_or(0)
    }

    /// Nonzero counts sorted by symbol.
    pub fn counts(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(&s, &c)| (s, c)).collect();
        v.sort_unstable();
        v
    }

    /// Accumulated `ln Q(xⁿ)`.
    pub fn log_prob(&self) -> f64 {
        self.log_prob.value()
    }

    fn check(&self, symbol: u64) -> Result<()> {
        if symbol >= self.alphabet_size {
            return Err(Error::SymbolOutOfRange { symbol, alphabet_size: self.alphabet_size });
        }
        Ok(())
    }

    /// `(c[symbol] + ½) / (n + m/2)`.
    pub fn predictive(&self, symbol: u64) -> Result<f64> {
        self.check(symbol)?;
        Ok(self.predictive_unchecked(symbol))
    }

    pub(crate) fn predictive_unchecked(&self, symbol: u64) -> f64 {
        (self.count(symbol) as f64 + 0.5) / (self.total as f64 + 0.5 * self.alphabet_size as f64)
    }

    /// Records `symbol` and returns the log predictive probability it was
    /// assigned.
    pub fn observe(&mut self, symbol: u64) -> Result<f64> {
        self.check(symbol)?;
        Ok(self.observe_unchecked(symbol))
    }

    pub(crate) fn observe_unchecked(&mut self, symbol: u64) -> f64 {
        let increment = self.predictive_unchecked(symbol).ln();
        *self.counts.entry(symbol).or_insert(0) += 1;
        self.total += 1;
        self.log_prob.add(increment);
        increment
    }

    /// The Gamma-function form of [`log_prob`](Self::log_prob) for the
    /// current counts.
    pub fn closed_form_log_prob(&self) -> f64 {
        kt_log_prob_closed_form(self.counts().into_iter().map(|(_, c)| c), self.alphabet_size)
    }
}

/// `ln Q` from symbol counts alone. Zero counts may be included or omitted.
pub fn kt_log_prob_closed_form<I>(counts: I, alphabet_size: u64) -> f64
where
    I: IntoIterator<Item = u64>,
{
    let half_m = 0.5 * alphabet_size as f64;
    let ln_gamma_half = libm::lgamma(0.5);
    let mut n = 0u64;
    let mut acc = CompensatedSum::default();
    for c in counts {
        if c > 0 {
            n += c;
            acc.add(libm::lgamma(c as f64 + 0.5) - ln_gamma_half);
        }
    }
    acc.add(libm::lgamma(half_m) - libm::lgamma(n as f64 + half_m));
    acc.value()
}

//! Exact values of `S_{k,l}^{(z)}(n) = Σ_{λ ∈ H(k,l;n)} (f^λ)^z`.
//!
//! Single values go through the hook-length formula. Whole series are built
//! level by level with the branching rule `f^λ = Σ f^{λ - corner}`: the hook
//! is closed under corner removal, so every predecessor of a level-`n` shape
//! is a level-`n-1` shape of the same hook.

use std::collections::HashMap;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::RecurrenceOperator;
use crate::shapes::{enumerate_hook_partitions, syt_count, HookConstraint, Partition};

/// Which S-sequence a record holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesKey {
    pub k: u32,
    pub l: u32,
    pub z: u32,
}

impl SeriesKey {
    pub fn new(k: u32, l: u32, z: u32) -> Result<Self> {
        if z == 0 {
            return Err(Error::InvalidExponent(0));
        }
        Ok(Self { k, l, z })
    }

    pub fn hook(&self) -> HookConstraint {
        HookConstraint::new(self.k, self.l)
    }
}

/// Consecutive exact terms `A(start), A(start+1), ...` of an integer sequence.
///
/// `key` is set for S-sequences and absent for arbitrary input sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceRecord {
    pub key: Option<SeriesKey>,
    pub start: u64,
    pub terms: Vec<Integer>,
}

impl SequenceRecord {
    pub fn new(key: Option<SeriesKey>, start: u64, terms: Vec<Integer>) -> Self {
        Self { key, start, terms }
    }

    /// An unkeyed sequence starting at index 0.
    pub fn from_terms(terms: Vec<Integer>) -> Self {
        Self::new(None, 0, terms)
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        Self::from_terms(values.iter().map(|&v| Integer::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Index of the last stored term, `start - 1` when empty.
    pub fn end(&self) -> i64 {
        self.start as i64 + self.terms.len() as i64 - 1
    }

    pub fn term(&self, n: u64) -> Result<&Integer> {
        n.checked_sub(self.start)
            .and_then(|i| self.terms.get(i as usize))
            .ok_or(Error::OutOfRange { n, start: self.start, end: self.end() })
    }

    /// Keeps the terms with index at most `n_max`.
    pub fn truncated(&self, n_max: u64) -> Self {
        let keep = (n_max + 1).saturating_sub(self.start) as usize;
        Self {
            key: self.key,
            start: self.start,
            terms: self.terms.iter().take(keep).cloned().collect(),
        }
    }

    /// Drops the first `count` terms.
    pub fn skip(&self, count: usize) -> Self {
        Self {
            key: self.key,
            start: self.start + count as u64,
            terms: self.terms.iter().skip(count).cloned().collect(),
        }
    }

    /// Multiplies every term by `factor`.
    pub fn scaled(&self, factor: &Integer) -> Self {
        Self {
            key: None,
            start: self.start,
            terms: self.terms.iter().map(|t| Integer::from(t * factor)).collect(),
        }
    }
}

/// `S_{k,l}^{(z)}(n)` by enumeration and the hook-length formula.
pub fn compute_s(k: u32, l: u32, z: u32, n: u32) -> Result<Integer> {
    let key = SeriesKey::new(k, l, z)?;
    let shapes: Vec<Partition> = enumerate_hook_partitions(n, key.hook()).collect();
    shapes
        .par_iter()
        .map(|shape| syt_count(shape).map(|f| f.pow(z)))
        .try_reduce(Integer::new, |a, b| Ok(a + b))
}

/// Level-by-level builder of `f^λ` over a hook; resumable.
pub struct SeriesBuilder {
    key: SeriesKey,
    level: u32,
    counts: HashMap<Partition, Integer>,
    terms: Vec<Integer>,
}

impl SeriesBuilder {
    pub fn new(key: SeriesKey) -> Self {
        let mut counts = HashMap::new();
        counts.insert(Partition::empty(), Integer::from(1));
        Self { key, level: 0, counts, terms: vec![Integer::from(1)] }
    }

    /// Advances until the term at `n_max` is known.
    pub fn extend_to(&mut self, n_max: u32) {
        while self.level < n_max {
            let next = self.level + 1;
            let shapes: Vec<Partition> = enumerate_hook_partitions(next, self.key.hook()).collect();
            let prev = &self.counts;
            let counts: Vec<Integer> = shapes
                .par_iter()
                .map(|shape| {
                    shape
                        .remove_corners()
                        .map(|smaller| prev.get(&smaller).expect("hook is closed under corner removal"))
                        .sum()
                })
                .collect();
            let z = self.key.z;
            let term = counts
                .par_iter()
                .map(|f| Integer::from(f.pow(z)))
                .reduce(Integer::new, |a, b| a + b);
            self.counts = shapes.into_iter().zip(counts).collect();
            self.terms.push(term);
            self.level = next;
        }
    }

    pub fn record(&self) -> SequenceRecord {
        SequenceRecord::new(Some(self.key), 0, self.terms.clone())
    }
}

/// Terms `S(0..=n_max)`.
pub fn compute_series(k: u32, l: u32, z: u32, n_max: u32) -> Result<SequenceRecord> {
    let key = SeriesKey::new(k, l, z)?;
    let mut builder = SeriesBuilder::new(key);
    builder.extend_to(n_max);
    Ok(builder.record())
}

/// Appends terms up to `n_target` using `A(n+L) = -(Σ_{i<L} p_i(n) A(n+i)) / p_L(n)`.
pub fn extend_via_recurrence(
    seq: &SequenceRecord,
    op: &RecurrenceOperator,
    n_target: u64,
) -> Result<SequenceRecord> {
    let order = op.order();
    if seq.len() < order + 1 {
        return Err(Error::Precondition(format!(
            "need at least {} terms to extend with an order-{order} recurrence, have {}",
            order + 1,
            seq.len()
        )));
    }
    let mut out = seq.clone();
    let lead = &op.coeffs()[order];
    while out.end() < n_target as i64 {
        let m = (out.end() + 1) as u64;
        let n = m - order as u64;
        let n_int = Integer::from(n);
        let base = (n - out.start) as usize;
        let mut acc = Integer::new();
        for (i, p) in op.coeffs()[..order].iter().enumerate() {
            acc += p.eval(&n_int) * &out.terms[base + i];
        }
        let divisor = lead.eval(&n_int);
        if divisor == 0 {
            return Err(Error::LeadingCoefficientZero { n });
        }
        if !acc.is_divisible(&divisor) {
            return Err(Error::NonIntegral { n: m });
        }
        out.terms.push(-acc.div_exact(&divisor));
    }
    Ok(out)
}

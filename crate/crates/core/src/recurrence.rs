//! Guessing annihilating operators `Σ_{i=0}^{L} p_i(n) N^i` by undetermined coefficients.
//!
//! For a trial order `L` and degree `D` the unknowns are the coefficients
//! `c_{i,d}` of `p_i(n) = Σ_d c_{i,d} n^d`; every index `n` whose shifted terms
//! `A(n)..A(n+L)` are known contributes one linear equation. A nontrivial
//! kernel gives a candidate operator, which is then checked term by term.

use std::fmt;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RationalMatrix, FILTER_PRIME};
use crate::poly::IntPoly;
use crate::sequence::SequenceRecord;

/// Linear recurrence operator with integer polynomial coefficients in `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceOperator {
    coeffs: Vec<IntPoly>,
    valid_from: u64,
}

impl RecurrenceOperator {
    /// `coeffs[i]` multiplies `A(n+i)`; trailing zero polynomials are dropped.
    pub fn new(mut coeffs: Vec<IntPoly>, valid_from: u64) -> Result<Self> {
        while coeffs.last().is_some_and(IntPoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Precondition("an operator needs order at least 1".into()));
        }
        Ok(Self { coeffs, valid_from })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.coeffs
    }

    pub fn valid_from(&self) -> u64 {
        self.valid_from
    }

    pub fn with_valid_from(mut self, valid_from: u64) -> Self {
        self.valid_from = valid_from;
        self
    }

    /// Largest degree among the `p_i`.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().filter_map(IntPoly::degree).max().unwrap_or(0)
    }

    /// Integers `n ≥ from` where `p_L(n) = 0`; the recurrence cannot be unrolled past them.
    pub fn singular_points(&self, from: u64) -> Vec<u64> {
        let (roots, _) = crate::asymptotics::rational_roots(&self.coeffs[self.order()]);
        let mut points: Vec<u64> = roots
            .iter()
            .filter(|(r, _)| *r.denom() == 1)
            .filter_map(|(r, _)| r.numer().to_u64())
            .filter(|&n| n >= from)
            .collect();
        points.sort_unstable();
        points
    }

    fn degree_sum(&self) -> usize {
        self.coeffs.iter().filter_map(IntPoly::degree).sum()
    }

    fn max_coeff_bits(&self) -> u32 {
        self.coeffs
            .iter()
            .flat_map(|p| p.coeffs().iter())
            .map(|c| c.significant_bits())
            .max()
            .unwrap_or(0)
    }

    /// Removes the common polynomial factor and integer content, and makes the
    /// leading coefficient of `p_L` positive.
    pub fn canonicalize(&self) -> Self {
        let common = self
            .coeffs
            .iter()
            .filter(|p| !p.is_zero())
            .fold(IntPoly::zero(), |g, p| if g.is_zero() { p.primitive_part() } else { g.gcd(p) });
        let mut coeffs: Vec<IntPoly> = self
            .coeffs
            .iter()
            .map(|p| p.div_exact(&common).expect("gcd divides every coefficient"))
            .collect();
        let mut content = Integer::new();
        for p in &coeffs {
            content.gcd_mut(&p.content());
        }
        if coeffs.last().and_then(IntPoly::leading).is_some_and(|c| *c < 0) {
            content = -content;
        }
        for p in &mut coeffs {
            *p = p.div_scalar(&content).expect("content divides every coefficient");
        }
        Self { coeffs, valid_from: self.valid_from }
    }

    /// `Σ_i p_i(n) A(n+i)`.
    pub fn apply(&self, seq: &SequenceRecord, n: u64) -> Result<Integer> {
        let n_int = Integer::from(n);
        let mut acc = Integer::new();
        for (i, p) in self.coeffs.iter().enumerate() {
            let term = seq.term(n + i as u64)?;
            if p.is_zero() || *term == 0 {
                continue;
            }
            acc += p.eval(&n_int) * term;
        }
        Ok(acc)
    }

    /// `Σ_i [n^d] p_i · μ^i` with `d` the operator degree.
    pub fn characteristic_polynomial(&self) -> IntPoly {
        let d = self.degree();
        IntPoly::new(self.coeffs.iter().map(|p| p.coeff(d)).collect())
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            order: self.order(),
            coeffs: self
                .coeffs
                .iter()
                .map(|p| p.coeffs().iter().map(Integer::to_string).collect())
                .collect(),
            valid_from: self.valid_from,
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        let coeffs = json
            .coeffs
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| c.parse::<Integer>().map_err(|e| Error::Cache(format!("bad coefficient {c:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()
                    .map(IntPoly::new)
            })
            .collect::<Result<Vec<_>>>()?;
        let op = Self::new(coeffs, json.valid_from)?;
        if op.order() != json.order {
            return Err(Error::Cache(format!("order {} does not match {} coefficient lists", json.order, json.coeffs.len())));
        }
        Ok(op)
    }
}

impl fmt::Display for RecurrenceOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", p.display_in("n"))?;
            match i {
                0 => {}
                1 => write!(f, "*N")?,
                _ => write!(f, "*N^{i}")?,
            }
        }
        Ok(())
    }
}

/// Serialized operator: `coeffs[i][d]` is the coefficient of `n^d` in `p_i`, as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub order: usize,
    pub coeffs: Vec<Vec<String>>,
    pub valid_from: u64,
}

/// Search limits for [`fit_recurrence`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitBounds {
    pub max_order: usize,
    pub max_degree: usize,
    /// Equations required beyond the number of unknowns.
    pub surplus: usize,
}

impl Default for FitBounds {
    fn default() -> Self {
        Self { max_order: 8, max_degree: 8, surplus: 10 }
    }
}

fn system_rows(seq: &SequenceRecord, order: usize, degree: usize) -> Vec<Vec<Integer>> {
    let equations = seq.len() - order;
    (0..equations)
        .map(|row| {
            let n = seq.start + row as u64;
            let mut powers = Vec::with_capacity(degree + 1);
            let mut pw = Integer::from(1);
            for _ in 0..=degree {
                powers.push(pw.clone());
                pw *= n;
            }
            (0..=order)
                .flat_map(|i| {
                    let term = &seq.terms[row + i];
                    powers.iter().map(move |p| Integer::from(p * term))
                })
                .collect()
        })
        .collect()
}

fn operator_from_vector(v: &[Integer], order: usize, degree: usize, valid_from: u64) -> Option<RecurrenceOperator> {
    let coeffs = v.chunks(degree + 1).take(order + 1).map(|c| IntPoly::new(c.to_vec())).collect();
    RecurrenceOperator::new(coeffs, valid_from).ok().map(|op| op.canonicalize())
}

fn try_fit(seq: &SequenceRecord, bounds: FitBounds) -> Option<RecurrenceOperator> {
    for order in 1..=bounds.max_order {
        if seq.len() <= order {
            break;
        }
        for degree in 0..=bounds.max_degree {
            let unknowns = (order + 1) * (degree + 1);
            let equations = seq.len() - order;
            if equations < unknowns + bounds.surplus {
                break;
            }
            let rows = system_rows(seq, order, degree);
            if linalg::rank_mod_prime(&rows, FILTER_PRIME) == unknowns {
                continue;
            }
            let kernel = linalg::nullspace(&RationalMatrix::from_integer_rows(&rows));
            let best = kernel
                .iter()
                .filter_map(|v| operator_from_vector(v, order, degree, seq.start))
                .filter(|op| op.singular_points(seq.start).is_empty())
                .filter(|op| in_sample_zero(op, seq))
                .min_by_key(|op| (op.order(), op.degree(), op.degree_sum(), op.max_coeff_bits()));
            if let Some(op) = best {
                let from = discover_valid_from(&op, seq).unwrap_or(seq.start);
                return Some(op.with_valid_from(from));
            }
        }
    }
    None
}

fn in_sample_zero(op: &RecurrenceOperator, seq: &SequenceRecord) -> bool {
    let last = seq.end() - op.order() as i64;
    (seq.start as i64..=last).all(|n| op.apply(seq, n as u64).is_ok_and(|v| v == 0))
}

/// Smallest `v` such that the relation holds at every checkable `n ≥ v`.
fn discover_valid_from(op: &RecurrenceOperator, seq: &SequenceRecord) -> Option<u64> {
    let last = seq.end() - op.order() as i64;
    if last < seq.start as i64 {
        return None;
    }
    let mut from = None;
    for n in (seq.start..=last as u64).rev() {
        if op.apply(seq, n).ok()? != 0 {
            break;
        }
        from = Some(n);
    }
    from
}

/// Searches orders, then degrees, in increasing order for an annihilating operator.
///
/// Only operators whose leading coefficient has no integer root at or after the
/// first stored index are accepted, so the result can unroll the sequence from
/// its initial terms.
///
/// The search starts at the first stored term; if nothing is found the first
/// term is dropped and the search repeated once.
pub fn fit_recurrence(seq: &SequenceRecord, bounds: FitBounds) -> Result<Option<RecurrenceOperator>> {
    let needed = bounds.surplus + 3;
    if seq.len() < needed {
        return Err(Error::InsufficientTerms { needed, have: seq.len() });
    }
    if let Some(op) = try_fit(seq, bounds) {
        return Ok(Some(op));
    }
    if seq.len() > needed {
        return Ok(try_fit(&seq.skip(1), bounds));
    }
    Ok(None)
}

/// Outcome of checking an operator against stored terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// First equation index checked (the operator's declared `valid_from`).
    pub checked_from: u64,
    /// Last equation index checked; `None` when no equation fits in the data.
    pub max_checked: Option<u64>,
    /// Largest term index involved.
    pub max_term: Option<u64>,
    /// Every checked equation vanished.
    pub holds: bool,
    /// First failing equation index and the largest term it involves.
    pub first_failure: Option<(u64, u64)>,
    /// Smallest `v` from which the relation holds at every checkable index.
    pub valid_from: Option<u64>,
    /// Number of trailing terms treated as held out.
    pub holdout: usize,
    /// Equations touching at least one held-out term.
    pub holdout_equations: usize,
}

impl VerificationReport {
    /// Semi-rigorously verified: every checked equation holds and at least one touches held-out data.
    pub fn passed(&self) -> bool {
        self.holds && self.max_checked.is_some() && (self.holdout == 0 || self.holdout_equations > 0)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS (semi-rigorously verified)" } else { "FAIL" };
        write!(f, "{status}: ")?;
        match (self.max_checked, self.max_term) {
            (Some(n), Some(t)) => write!(f, "checked n = {}..={n} (terms through {t})", self.checked_from)?,
            _ => write!(f, "no equation fits in the data")?,
        }
        write!(f, ", {} equations touch the {} held-out terms", self.holdout_equations, self.holdout)?;
        if let Some((n, t)) = self.first_failure {
            write!(f, ", first failure at n = {n} (term {t})")?;
        }
        match self.valid_from {
            Some(v) => write!(f, ", holds from n = {v}"),
            None => write!(f, ", holds nowhere at the tail"),
        }
    }
}

/// Checks `op` at every index from its `valid_from` through the end of `seq`; the last
/// `holdout` terms are reported as held out.
pub fn verify(op: &RecurrenceOperator, seq: &SequenceRecord, holdout: usize) -> VerificationReport {
    let order = op.order() as u64;
    let checked_from = op.valid_from().max(seq.start);
    let last = seq.end() - order as i64;
    let holdout_start = seq.end() - holdout as i64 + 1;
    let mut report = VerificationReport {
        checked_from,
        max_checked: None,
        max_term: None,
        holds: true,
        first_failure: None,
        valid_from: discover_valid_from(op, seq),
        holdout,
        holdout_equations: 0,
    };
    if last < checked_from as i64 {
        report.holds = false;
        return report;
    }
    for n in checked_from..=last as u64 {
        let ok = op.apply(seq, n).is_ok_and(|v| v == 0);
        if (n + order) as i64 >= holdout_start {
            report.holdout_equations += 1;
        }
        if !ok && report.first_failure.is_none() {
            report.holds = false;
            report.first_failure = Some((n, n + order));
        }
    }
    report.max_checked = Some(last as u64);
    report.max_term = Some(last as u64 + order);
    report
}

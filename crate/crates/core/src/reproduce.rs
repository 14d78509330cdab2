//! End-to-end reproduction of the four reference cases.
//!
//! Each case is computed from scratch: terms, fitted operator, holdout
//! verification, expansion and constant are compared with the embedded data.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rug::{Float, Integer};

use crate::asymptotics;
use crate::constant::{self, DEFAULT_PRECISION_BITS, DEFAULT_SEARCH_BOUND};
use crate::recurrence::{self, FitBounds};
use crate::reference::{ReferenceCase, CASES};
use crate::sequence::{self, SequenceRecord};

/// Relative agreement required between the estimated and the reference constant.
pub const CONSTANT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    /// Index into [`CASES`].
    pub case: usize,
    /// Index `n` of the expected term to alter (terms start at `n = 1`).
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReproductionOptions {
    /// Terms `n = 0..train` used for fitting.
    pub train: usize,
    pub holdout: usize,
    /// Expansion order used for the constant; the printed comparison uses 3 terms.
    pub order: usize,
    pub at_n: u64,
    /// Test mode: alters one expected term, which must then be reported.
    pub perturb: Option<Perturbation>,
}

impl Default for ReproductionOptions {
    fn default() -> Self {
        Self { train: 60, holdout: 20, order: asymptotics::DEFAULT_ORDER, at_n: 300, perturb: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
    Skipped,
}

impl Check {
    fn from_mismatch(mismatch: Option<String>) -> Self {
        mismatch.map_or(Check::Pass, Check::Fail)
    }

    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }

    fn cell(&self) -> &'static str {
        match self {
            Check::Pass => "pass",
            Check::Fail(_) => "FAIL",
            Check::Skipped => "skip",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub label: String,
    pub terms: Check,
    pub operator: Check,
    pub verification: Check,
    pub expansion: Check,
    pub constant: Check,
    pub elapsed: Duration,
}

impl CaseOutcome {
    fn checks(&self) -> [(&'static str, &Check); 5] {
        [
            ("terms", &self.terms),
            ("operator", &self.operator),
            ("verification", &self.verification),
            ("expansion", &self.expansion),
            ("constant", &self.constant),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }

    /// First failing (or skipped) check with its message.
    pub fn first_failure(&self) -> Option<String> {
        self.checks().iter().find_map(|(name, c)| match c {
            Check::Pass => None,
            Check::Fail(msg) => Some(format!("{}: {name}: {msg}", self.label)),
            Check::Skipped => Some(format!("{}: {name}: skipped", self.label)),
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReproductionReport {
    pub cases: Vec<CaseOutcome>,
    pub elapsed: Duration,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.cases.iter().find_map(CaseOutcome::first_failure)
    }
}

impl fmt::Display for ReproductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>6} {:>9} {:>13} {:>10} {:>9} {:>9}", "case", "terms", "operator", "verification", "expansion", "constant", "time")?;
        for c in &self.cases {
            writeln!(
                f,
                "{:<22} {:>6} {:>9} {:>13} {:>10} {:>9} {:>8.2}s",
                c.label,
                c.terms.cell(),
                c.operator.cell(),
                c.verification.cell(),
                c.expansion.cell(),
                c.constant.cell(),
                c.elapsed.as_secs_f64()
            )?;
        }
        match self.first_failure() {
            None => write!(f, "all {} cases reproduced ({:.2}s)", self.cases.len(), self.elapsed.as_secs_f64()),
            Some(msg) => write!(f, "first mismatch: {msg}"),
        }
    }
}

fn compare_terms(case: &ReferenceCase, seq: &SequenceRecord, perturb: Option<usize>) -> Option<String> {
    let mut expected = case.expected_terms();
    if let Some(n) = perturb {
        if let Some(t) = n.checked_sub(1).and_then(|i| expected.get_mut(i)) {
            *t += 1;
        }
    }
    expected.iter().enumerate().find_map(|(i, want)| {
        let n = i as u64 + 1;
        match seq.term(n) {
            Ok(got) if got == want => None,
            Ok(got) => Some(format!("term n={n}: expected {want}, computed {got}")),
            Err(e) => Some(format!("term n={n}: {e}")),
        }
    })
}

fn run_case(index: usize, case: &ReferenceCase, opts: &ReproductionOptions) -> CaseOutcome {
    let started = Instant::now();
    let mut out = CaseOutcome {
        label: case.label(),
        terms: Check::Skipped,
        operator: Check::Skipped,
        verification: Check::Skipped,
        expansion: Check::Skipped,
        constant: Check::Skipped,
        elapsed: Duration::ZERO,
    };
    let perturb = opts.perturb.as_ref().filter(|p| p.case == index).map(|p| p.n);
    let n_max = (opts.train + opts.holdout).saturating_sub(1).max(case.terms.len());
    let seq = match sequence::compute_series(case.k, case.l, case.z, n_max as u32) {
        Ok(s) => s,
        Err(e) => {
            out.terms = Check::Fail(e.to_string());
            out.elapsed = started.elapsed();
            return out;
        }
    };
    out.terms = Check::from_mismatch(compare_terms(case, &seq, perturb));

    let train = seq.truncated(opts.train.saturating_sub(1) as u64);
    let op = match recurrence::fit_recurrence(&train, FitBounds::default()) {
        Ok(Some(op)) => op,
        Ok(None) => {
            out.operator = Check::Fail("no operator found within bounds".into());
            out.elapsed = started.elapsed();
            return out;
        }
        Err(e) => {
            out.operator = Check::Fail(e.to_string());
            out.elapsed = started.elapsed();
            return out;
        }
    };
    let expected_op = case.cleared_operator();
    out.operator = Check::from_mismatch((op.coeffs() != expected_op.coeffs()).then(|| {
        format!("fitted {op} (L={}, D={}), expected {expected_op}", op.order(), op.degree())
    }));

    let report = recurrence::verify(&op, &seq.truncated((opts.train + opts.holdout).saturating_sub(1) as u64), opts.holdout);
    out.verification = Check::from_mismatch((!report.passed()).then(|| report.to_string()));

    let exp = match asymptotics::expansion(&op, opts.order.max(3)) {
        Ok(e) => e,
        Err(e) => {
            out.expansion = Check::Fail(e.to_string());
            out.elapsed = started.elapsed();
            return out;
        }
    };
    out.expansion = Check::from_mismatch((!case.matches_expansion(&exp)).then(|| {
        format!("computed {}", exp.truncated(3))
    }));

    out.constant = Check::from_mismatch(check_constant(case, &seq, &op, &exp, opts));
    out.elapsed = started.elapsed();
    out
}

fn check_constant(
    case: &ReferenceCase,
    seq: &SequenceRecord,
    op: &recurrence::RecurrenceOperator,
    exp: &asymptotics::AsymptoticExpansion,
    opts: &ReproductionOptions,
) -> Option<String> {
    let long = match sequence::extend_via_recurrence(seq, op, opts.at_n + 1) {
        Ok(s) => s,
        Err(e) => return Some(e.to_string()),
    };
    let est = match constant::estimate_constant(&long, exp, opts.at_n, DEFAULT_PRECISION_BITS) {
        Ok(e) => e,
        Err(e) => return Some(e.to_string()),
    };
    let reference = case.constant.value(DEFAULT_PRECISION_BITS);
    let rel = (Float::with_val(DEFAULT_PRECISION_BITS, &est.value / &reference) - 1u32).abs().to_f64();
    if rel > CONSTANT_TOLERANCE {
        return Some(format!("estimate {} is {rel:e} away from {}", est.value_decimal(15), case.constant));
    }
    match constant::match_constant(&est, DEFAULT_SEARCH_BOUND) {
        Some(c) if c == case.constant => None,
        Some(c) => Some(format!("matched {c}, expected {}", case.constant)),
        None => Some(format!("no unique symbolic match for {}", est.value_decimal(15))),
    }
}

/// Runs every reference case (concurrently) and collects the outcomes in a fixed order.
pub fn run_reproduction(opts: &ReproductionOptions) -> ReproductionReport {
    let started = Instant::now();
    let cases = CASES.par_iter().enumerate().map(|(i, c)| run_case(i, c, opts)).collect();
    ReproductionReport { cases, elapsed: started.elapsed() }
}

/// Expected term used by a perturbation, for messages and tests.
pub fn expected_term(case: usize, n: usize) -> Option<Integer> {
    CASES.get(case)?.expected_terms().get(n.checked_sub(1)?).cloned()
}

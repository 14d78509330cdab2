use rug::{Float, Integer};

use hookrec::asymptotics;
use hookrec::constant::{self, DEFAULT_PRECISION_BITS};
use hookrec::recurrence::{self, FitBounds, RecurrenceOperator};
use hookrec::reference::{ReferenceCase, CASES};
use hookrec::sequence::{self, SequenceRecord};

fn fit(case: &ReferenceCase, terms: u64) -> RecurrenceOperator {
    let seq = sequence::compute_series(case.k, case.l, case.z, (terms - 1) as u32).unwrap();
    recurrence::fit_recurrence(&seq, FitBounds::default()).unwrap().unwrap()
}

#[test]
fn extension_from_fifteen_terms_matches_direct_values() {
    for case in &CASES {
        let direct = sequence::compute_series(case.k, case.l, case.z, 60).unwrap();
        let extended = sequence::extend_via_recurrence(&direct.truncated(14), &case.cleared_operator(), 60).unwrap();
        assert_eq!(extended.terms, direct.terms, "{}", case.label());
    }
}

#[test]
fn printed_extension_examples() {
    let seq = sequence::compute_series(2, 1, 1, 10).unwrap();
    let ext = sequence::extend_via_recurrence(&seq, &CASES[0].cleared_operator(), 20).unwrap();
    assert_eq!(*ext.term(20).unwrap(), 188689685u64);
    let seq = sequence::compute_series(2, 2, 1, 10).unwrap();
    let ext = sequence::extend_via_recurrence(&seq, &CASES[2].cleared_operator(), 22).unwrap();
    assert_eq!(*ext.term(22).unwrap(), 65167445872u64);
}

#[test]
fn refitting_on_longer_prefix_is_stable() {
    for case in &CASES {
        assert_eq!(fit(case, 60).coeffs(), fit(case, 80).coeffs(), "{}", case.label());
    }
}

#[test]
fn fitting_is_scale_invariant() {
    let factor = Integer::from(7919);
    for case in &CASES[..2] {
        let seq = sequence::compute_series(case.k, case.l, case.z, 59).unwrap();
        let plain = recurrence::fit_recurrence(&seq, FitBounds::default()).unwrap().unwrap();
        let scaled = recurrence::fit_recurrence(&seq.scaled(&factor), FitBounds::default()).unwrap().unwrap();
        assert_eq!(plain, scaled, "{}", case.label());
    }
}

fn extended(case: &ReferenceCase, to: u64) -> (RecurrenceOperator, SequenceRecord) {
    let op = case.cleared_operator();
    let seq = sequence::compute_series(case.k, case.l, case.z, 20).unwrap();
    let long = sequence::extend_via_recurrence(&seq, &op, to).unwrap();
    (op, long)
}

#[test]
fn residuals_decay_with_n_and_order() {
    let prec = DEFAULT_PRECISION_BITS;
    for case in &CASES {
        let (op, long) = extended(case, 301);
        let full = asymptotics::expansion(&op, 10).unwrap();
        let est = constant::estimate_constant(&long, &full, 300, prec).unwrap();
        let c = case.constant.value(prec);
        let c2 = est.companion_value.clone();
        let residual = |j: usize, n: u64| {
            constant::relative_residual(&long, &full.truncated(j), &c, c2.as_ref(), n, prec).unwrap()
        };
        for j in [3, 10] {
            assert!(residual(j, 100) < residual(j, 50), "{} J={j}", case.label());
        }
        for n in [50, 100] {
            assert!(residual(10, n) < residual(3, n), "{} n={n}", case.label());
        }
    }
}

#[test]
fn estimates_at_half_and_full_index_agree() {
    for case in &CASES {
        let (op, long) = extended(case, 301);
        let exp = asymptotics::expansion(&op, 10).unwrap();
        let est = constant::estimate_constant(&long, &exp, 300, DEFAULT_PRECISION_BITS).unwrap();
        assert_eq!(est.at_n, 300);
        assert!(est.drift() < 1e-6, "{}: drift {}", case.label(), est.drift());
    }
}

#[test]
fn two_two_linear_constant_is_one_over_four_pi() {
    let (op, long) = extended(&CASES[2], 301);
    let exp = asymptotics::expansion(&op, 10).unwrap();
    let est = constant::estimate_constant(&long, &exp, 300, DEFAULT_PRECISION_BITS).unwrap();
    let expected = Float::with_val(64, 0.0795775f64);
    let rel = Float::with_val(64, Float::with_val(64, &est.value - &expected) / &expected).abs();
    assert!(rel < 1e-6);
}

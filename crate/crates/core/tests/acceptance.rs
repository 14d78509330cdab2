//! Acceptance criteria, one reported line each. Runs without the libtest
//! harness so the summary is always printed; exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rug::{Float, Integer};

use hookrec::asymptotics;
use hookrec::constant::{self, DEFAULT_PRECISION_BITS, DEFAULT_SEARCH_BOUND};
use hookrec::poly::IntPoly;
use hookrec::recurrence::{self, FitBounds, RecurrenceOperator};
use hookrec::reference::CASES;
use hookrec::sequence::{self, SequenceRecord};
use hookrec::shapes::{self, HookConstraint, Partition};

const FIT_TERMS: u64 = 60;
const HOLDOUT: usize = 20;
const CONSTANT_AT: u64 = 300;
const CONSTANT_ORDER: usize = 10;
const CONSTANT_TOLERANCE: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    check(elapsed <= limit, || format!("{what} took {:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs()))
}

fn fitted(case: &hookrec::reference::ReferenceCase) -> Result<(RecurrenceOperator, SequenceRecord), String> {
    let seq = sequence::compute_series(case.k, case.l, case.z, (FIT_TERMS as usize + HOLDOUT - 1) as u32)
        .map_err(|e| e.to_string())?;
    let op = recurrence::fit_recurrence(&seq.truncated(FIT_TERMS - 1), FitBounds::default())
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("{}: no operator", case.label()))?;
    Ok((op, seq))
}

fn sequences() -> Outcome {
    let started = Instant::now();
    let mut lengths = Vec::new();
    for case in &CASES {
        let expected = case.expected_terms();
        let seq = sequence::compute_series(case.k, case.l, case.z, expected.len() as u32).map_err(|e| e.to_string())?;
        check(seq.terms[0] == 1, || format!("{}: S(0) = {}", case.label(), seq.terms[0]))?;
        check(seq.terms[1..] == expected[..], || format!("{}: term lists differ", case.label()))?;
        lengths.push(format!("{} (last {})", expected.len(), expected.last().unwrap()));
    }
    within(started.elapsed(), Duration::from_secs(10), "term lists")?;
    Ok(format!("{} in {:.2}s", lengths.join(", "), started.elapsed().as_secs_f64()))
}

fn operators() -> Outcome {
    let started = Instant::now();
    let mut shapes = Vec::new();
    for case in &CASES {
        let (op, seq) = fitted(case)?;
        let printed = case.cleared_operator();
        check(op.coeffs() == printed.coeffs(), || format!("{}: fitted {op}, printed {printed}", case.label()))?;
        let report = recurrence::verify(&op, &seq, HOLDOUT);
        check(report.passed() && report.holdout_equations > 0, || format!("{}: {report}", case.label()))?;
        shapes.push(format!("L={} D={}", op.order(), op.degree()));
    }
    within(started.elapsed(), Duration::from_secs(60), "fitting")?;
    Ok(format!("{} in {:.2}s, {HOLDOUT} held-out terms verified", shapes.join("; "), started.elapsed().as_secs_f64()))
}

fn expansions() -> Outcome {
    for case in &CASES {
        let (op, _) = fitted(case)?;
        for (source, operator) in [("fitted", op), ("printed", case.cleared_operator())] {
            let exp = asymptotics::expansion(&operator, 3).map_err(|e| e.to_string())?;
            check(case.matches_expansion(&exp), || format!("{} ({source}): got {exp}", case.label()))?;
        }
    }
    Ok("mu, theta and a_1..a_3 exact for all four cases".into())
}

fn constants() -> Outcome {
    let started = Instant::now();
    let mut worst = 0f64;
    for case in &CASES {
        let (op, seq) = fitted(case)?;
        let long = sequence::extend_via_recurrence(&seq, &op, CONSTANT_AT + 1).map_err(|e| e.to_string())?;
        let exp = asymptotics::expansion(&op, CONSTANT_ORDER).map_err(|e| e.to_string())?;
        let est = constant::estimate_constant(&long, &exp, CONSTANT_AT, DEFAULT_PRECISION_BITS).map_err(|e| e.to_string())?;
        let reference = case.constant.value(DEFAULT_PRECISION_BITS);
        let rel = (Float::with_val(DEFAULT_PRECISION_BITS, &est.value / &reference) - 1u32).abs().to_f64();
        check(rel <= CONSTANT_TOLERANCE, || format!("{}: relative error {rel:e}", case.label()))?;
        let matched = constant::match_constant(&est, DEFAULT_SEARCH_BOUND);
        check(matched.as_ref() == Some(&case.constant), || format!("{}: matched {matched:?}", case.label()))?;
        worst = worst.max(rel);
    }
    Ok(format!("all four matched, worst relative error {worst:.1e}, {:.2}s", started.elapsed().as_secs_f64()))
}

/// Partitions of `n` with parts at most `max`, generated independently of the library.
fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn oracles() -> Outcome {
    let mut shapes_checked = 0;
    for n in 0..=shapes::BRUTEFORCE_MAX_CELLS {
        for parts in partitions(n, n) {
            let p = Partition::new(parts.clone()).map_err(|e| e.to_string())?;
            let hook = shapes::syt_count(&p).map_err(|e| e.to_string())?;
            let frob = shapes::syt_count_frobenius(&p);
            let brute = shapes::syt_count_bruteforce(&p).map_err(|e| e.to_string())?;
            check(hook == frob && hook == brute, || format!("{parts:?}: {hook}, {frob}, {brute}"))?;
            shapes_checked += 1;
        }
    }
    for k in 0..=3u32 {
        for l in 0..=3u32 {
            let full = (k + 1) * (l + 1);
            for n in 0..full {
                let all: Integer = partitions(n, n)
                    .into_iter()
                    .map(|parts| {
                        let f = shapes::syt_count(&Partition::new(parts).unwrap()).unwrap();
                        Integer::from(&f * &f)
                    })
                    .sum();
                let s = sequence::compute_s(k, l, 2, n).map_err(|e| e.to_string())?;
                check(s == all, || format!("stability fails at (k,l)=({k},{l}), n={n}"))?;
            }
            for z in [1, 2] {
                let a = sequence::compute_series(k, l, z, 25).map_err(|e| e.to_string())?;
                let b = sequence::compute_series(l, k, z, 25).map_err(|e| e.to_string())?;
                check(a.terms == b.terms, || format!("transpose symmetry fails for ({k},{l}), z={z}"))?;
            }
        }
    }
    let s8 = sequence::compute_s(2, 2, 2, 8).map_err(|e| e.to_string())?;
    check(s8 == 40320, || format!("S(2,2,2,8) = {s8}"))?;
    let hook_sizes: usize = (0..=10).map(|n| shapes::enumerate_hook_partitions(n, HookConstraint::new(2, 2)).count()).sum();
    Ok(format!("{shapes_checked} shapes agree three ways, stability and transpose hold, {hook_sizes} (2,2)-hook shapes up to n=10"))
}

fn self_illustrations() -> Outcome {
    let mut fib = vec![Integer::from(1), Integer::from(1)];
    while fib.len() < 40 {
        let next = Integer::from(&fib[fib.len() - 1] + &fib[fib.len() - 2]);
        fib.push(next);
    }
    let op = recurrence::fit_recurrence(&SequenceRecord::from_terms(fib), FitBounds::default())
        .map_err(|e| e.to_string())?
        .ok_or("Fibonacci: no operator")?;
    let want = RecurrenceOperator::new(vec![IntPoly::from_i64s(&[-1]), IntPoly::from_i64s(&[-1]), IntPoly::from_i64s(&[1])], 0).unwrap();
    check(op.coeffs() == want.coeffs(), || format!("Fibonacci: {op}"))?;
    let fact: Vec<Integer> = (0..40u32).map(|n| Integer::from(Integer::factorial(n))).collect();
    let op2 = recurrence::fit_recurrence(&SequenceRecord::from_terms(fact), FitBounds::default())
        .map_err(|e| e.to_string())?
        .ok_or("n!: no operator")?;
    let want2 = RecurrenceOperator::new(vec![IntPoly::from_i64s(&[-1, -1]), IntPoly::from_i64s(&[1])], 0).unwrap();
    check(op2.coeffs() == want2.coeffs(), || format!("n!: {op2}"))?;
    Ok(format!("Fibonacci: {op}; n!: {op2}"))
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hookrec"))
        .arg("paper")
        .env_remove("HOOKREC_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    check(out.status.success(), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout).lines().last().unwrap_or(""))
    })?;
    within(elapsed, Duration::from_secs(120), "paper")?;
    Ok(format!("exit 0 in {:.2}s", elapsed.as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("sequence reproduction", sequences),
        ("operator reproduction", operators),
        ("asymptotics reproduction", expansions),
        ("constant recovery", constants),
        ("oracle suite", oracles),
        ("self-illustrations", self_illustrations),
        ("end-to-end reproduction", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {status} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

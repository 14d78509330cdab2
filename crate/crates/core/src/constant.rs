//! Empirical constant factor `C` and its recognition as `(p/q) √m π^e`.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::asymptotics::AsymptoticExpansion;
use crate::error::{Error, Result};
use crate::sequence::SequenceRecord;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
/// Relative agreement required of a symbolic candidate.
pub const MATCH_TOLERANCE: f64 = 1e-8;
/// Default bound on numerator and denominator during matching.
pub const DEFAULT_SEARCH_BOUND: u32 = 256;
pub const SQRT_CANDIDATES: [u32; 5] = [1, 2, 3, 5, 6];
/// Twice the admissible powers of π, i.e. π^{-2} .. π^{1} in half steps.
pub const PI_EXP_TWICE_CANDIDATES: [i32; 7] = [-4, -3, -2, -1, 0, 1, 2];

/// `(p/q) · √m · π^{e}` with `e = pi_exp_twice / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstantCandidate {
    pub p: u32,
    pub q: u32,
    pub m: u32,
    pub pi_exp_twice: i32,
}

impl ConstantCandidate {
    pub fn pi_exp(&self) -> Rational {
        Rational::from((self.pi_exp_twice, 2))
    }

    pub fn value(&self, prec: u32) -> Float {
        symbolic_base(self.m, self.pi_exp_twice, prec) * self.p / self.q
    }

    pub fn to_json(&self) -> CandidateJson {
        CandidateJson { p: self.p, q: self.q, m: self.m, pi_exp: self.pi_exp().to_string() }
    }

    pub fn from_json(json: &CandidateJson) -> Result<Self> {
        let e: Rational = json.pi_exp.parse().map_err(|e| Error::Cache(format!("bad pi_exp {:?}: {e}", json.pi_exp)))?;
        let twice = Rational::from(&e * 2u32);
        if !twice.denom().eq(&1u32) {
            return Err(Error::Cache(format!("pi_exp {} is not a half-integer", json.pi_exp)));
        }
        let pi_exp_twice = twice.numer().to_i32().ok_or_else(|| Error::Cache("pi_exp out of range".into()))?;
        Ok(Self { p: json.p, q: json.q, m: json.m, pi_exp_twice })
    }
}

impl fmt::Display for ConstantCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}/{})", self.p, self.q)?;
        if self.m != 1 {
            write!(f, " * sqrt({})", self.m)?;
        }
        if self.pi_exp_twice != 0 {
            write!(f, " * pi^({})", self.pi_exp())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub p: u32,
    pub q: u32,
    pub m: u32,
    pub pi_exp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantJson {
    pub value_decimal: String,
    pub matched: Option<CandidateJson>,
}

/// `√m · π^{e/2}`.
fn symbolic_base(m: u32, pi_exp_twice: i32, prec: u32) -> Float {
    let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
    Float::with_val(prec, m).sqrt() * sqrt_pi.pow(pi_exp_twice)
}

/// Numeric estimate of the constant factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantEstimate {
    pub value: Float,
    pub precision_bits: u32,
    pub at_n: u64,
    /// Same estimate at `at_n / 2`, to gauge convergence.
    pub half_value: Float,
    /// Constant of the oscillating `(-μ)^n` solution, when present.
    pub companion_value: Option<Float>,
    pub matched: Option<ConstantCandidate>,
}

impl ConstantEstimate {
    /// `|value / half_value - 1|`.
    pub fn drift(&self) -> f64 {
        let ratio = Float::with_val(self.precision_bits, &self.value / &self.half_value);
        (ratio - 1u32).abs().to_f64()
    }

    pub fn value_decimal(&self, digits: usize) -> String {
        self.value.to_string_radix(10, Some(digits))
    }

    pub fn to_json(&self) -> ConstantJson {
        ConstantJson {
            value_decimal: self.value_decimal(30),
            matched: self.matched.as_ref().map(ConstantCandidate::to_json),
        }
    }
}

/// `n^θ (1 + Σ a_j n^{-j})` in floating point; `θ` goes through an exact root.
pub fn shape_factor(exp: &AsymptoticExpansion, n: u64, prec: u32) -> Float {
    let nf = Float::with_val(prec, n);
    let (num, den) = (exp.theta.numer(), exp.theta.denom());
    let num_abs = num.clone().abs().to_u32().expect("exponent numerator fits in u32");
    let den = den.to_u32().expect("exponent denominator fits in u32");
    let mut power = Float::with_val(prec, nf.clone().pow(num_abs)).root(den);
    if *num < 0 {
        power = power.recip();
    }
    let inv_n = Rational::from((1u32, Integer::from(n)));
    let mut series = Rational::from(1);
    let mut inv_pow = Rational::from(1);
    for a in &exp.coeffs {
        inv_pow *= &inv_n;
        series += Rational::from(a * &inv_pow);
    }
    power * Float::with_val(prec, &series)
}

/// `A(n) / μ^n` exactly, then rounded.
fn scaled_term(seq: &SequenceRecord, mu: &Rational, n: u64, prec: u32) -> Result<Float> {
    let term = seq.term(n)?;
    let exp = u32::try_from(n).map_err(|_| Error::Precondition(format!("index {n} too large")))?;
    let mu_pow = Rational::from(mu.pow(exp));
    if mu_pow == 0 {
        return Err(Error::Precondition("growth base is zero".into()));
    }
    Ok(Float::with_val(prec, Rational::from(term) / mu_pow))
}

/// Main and companion constants at index `n`.
fn constants_at(seq: &SequenceRecord, exp: &AsymptoticExpansion, n: u64, prec: u32) -> Result<(Float, Option<Float>)> {
    let main_shape = shape_factor(exp, n, prec);
    let r0 = scaled_term(seq, &exp.mu, n, prec)?;
    let Some(comp) = &exp.companion else {
        let value = r0 / main_shape;
        if !value.is_finite() {
            return Err(Error::Precondition(format!("estimate at n = {n} is not finite at {prec} bits")));
        }
        return Ok((value, None));
    };
    // A(n)/μ^n = C s(n) + C' (-1)^n s'(n), solved with the equations at n and n+1.
    let r1 = scaled_term(seq, &exp.mu, n + 1, prec)?;
    let sign = |k: u64| if k.is_multiple_of(2) { 1i32 } else { -1i32 };
    let s0 = main_shape;
    let s1 = shape_factor(exp, n + 1, prec);
    let t0 = shape_factor(comp, n, prec) * sign(n);
    let t1 = shape_factor(comp, n + 1, prec) * sign(n + 1);
    let det = Float::with_val(prec, &s0 * &t1) - Float::with_val(prec, &s1 * &t0);
    if det.is_zero() {
        return Err(Error::Precondition(format!("singular two-constant system at n = {n}")));
    }
    let c = (Float::with_val(prec, &r0 * &t1) - Float::with_val(prec, &r1 * &t0)) / &det;
    let c2 = (Float::with_val(prec, &s0 * &r1) - Float::with_val(prec, &s1 * &r0)) / &det;
    Ok((c, Some(c2)))
}

/// Ratio of the sequence to its expansion at `at_n` (and at `at_n / 2`).
///
/// When the expansion carries a companion at `-μ`, both constants are fitted jointly
/// from two consecutive terms, so the sequence must also hold `A(at_n + 1)`.
pub fn estimate_constant(
    seq: &SequenceRecord,
    exp: &AsymptoticExpansion,
    at_n: u64,
    precision_bits: u32,
) -> Result<ConstantEstimate> {
    let min_n = 10 * exp.order() as u64;
    if at_n < min_n {
        return Err(Error::Precondition(format!("at_n = {at_n} is below 10*J = {min_n}")));
    }
    if at_n == 0 && exp.companion.is_some() {
        return Err(Error::Precondition("at_n must be positive".into()));
    }
    let (value, companion_value) = constants_at(seq, exp, at_n, precision_bits)?;
    let half_n = (at_n / 2).max(1).min(at_n);
    let (half_value, _) = constants_at(seq, exp, half_n, precision_bits)?;
    Ok(ConstantEstimate { value, precision_bits, at_n, half_value, companion_value, matched: None })
}

/// Outcome of a symbolic search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantMatch {
    Unique(ConstantCandidate),
    NotFound,
    Ambiguous(Vec<ConstantCandidate>),
}

impl ConstantMatch {
    pub fn candidate(self) -> Option<ConstantCandidate> {
        match self {
            ConstantMatch::Unique(c) => Some(c),
            _ => None,
        }
    }
}

/// All candidates `(p/q) √m π^e` with `p, q ≤ search_bound` within [`MATCH_TOLERANCE`].
pub fn search_constant(value: &Float, search_bound: u32) -> ConstantMatch {
    let prec = value.prec().max(64);
    if !value.is_finite() || *value <= 0 {
        return ConstantMatch::NotFound;
    }
    let mut found = Vec::new();
    for &m in &SQRT_CANDIDATES {
        for &e in &PI_EXP_TWICE_CANDIDATES {
            let base = symbolic_base(m, e, prec);
            let ratio = Float::with_val(prec, value / &base);
            for q in 1..=search_bound {
                let scaled = Float::with_val(prec, &ratio * q).round();
                let Some(p) = scaled.to_integer().and_then(|p| p.to_u32()) else {
                    continue;
                };
                if p == 0 || p > search_bound || Integer::from(p).gcd(&Integer::from(q)) != 1 {
                    continue;
                }
                let approx = Float::with_val(prec, &base * p) / q;
                let rel = Float::with_val(prec, (approx - value) / value).abs();
                if rel.to_f64() <= MATCH_TOLERANCE {
                    found.push(ConstantCandidate { p, q, m, pi_exp_twice: e });
                }
            }
        }
    }
    match found.len() {
        0 => ConstantMatch::NotFound,
        1 => ConstantMatch::Unique(found.pop().unwrap()),
        _ => ConstantMatch::Ambiguous(found),
    }
}

/// Unique symbolic form of the estimate, if any.
pub fn match_constant(estimate: &ConstantEstimate, search_bound: u32) -> Option<ConstantCandidate> {
    search_constant(&estimate.value, search_bound).candidate()
}

/// `|A(n) / (C μ^n shape(n) + C' (-μ)^n shape'(n)) - 1|`.
pub fn relative_residual(
    seq: &SequenceRecord,
    exp: &AsymptoticExpansion,
    constant: &Float,
    companion_constant: Option<&Float>,
    n: u64,
    prec: u32,
) -> Result<f64> {
    let scaled = scaled_term(seq, &exp.mu, n, prec)?;
    let mut model = Float::with_val(prec, constant * shape_factor(exp, n, prec));
    if let (Some(comp), Some(c2)) = (&exp.companion, companion_constant) {
        let sign = if n.is_multiple_of(2) { 1 } else { -1 };
        model += Float::with_val(prec, c2 * shape_factor(comp, n, prec)) * sign;
    }
    Ok((scaled / model - 1u32).abs().to_f64())
}

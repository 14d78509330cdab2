//! Formal power-law solutions `μ^n n^θ (1 + Σ_j a_j n^{-j})` of recurrences.
//!
//! Substituting the ansatz into `Σ_i p_i(n) A(n+i)` and dividing by `μ^n n^θ`
//! leaves a series in descending powers of `n`. With `D` the operator degree,
//! the coefficient of `n^{D-s}` is
//!
//! ```text
//! E_s = Σ_i μ^i Σ_d c_{i,d} Σ_j a_j · binom(θ - j, t) · i^t,   t = s - (D - d) - j ≥ 0
//! ```
//!
//! since `(n+i)^θ (n+i)^{-j} = n^{θ-j} Σ_t binom(θ-j, t) (i/n)^t`. `E_0` is the
//! characteristic polynomial at `μ`, `E_1` is affine in `θ`, and `E_s` for
//! `s ≥ 2` is affine in `a_{s-1}` with slope `-(s-1) μ χ'(μ)`, nonzero for a
//! simple root. Everything is solved in exact rationals.

use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::recurrence::RecurrenceOperator;

/// Default number of correction terms.
pub const DEFAULT_ORDER: usize = 10;

/// Positive divisors of `|n|`, ascending; `n` must be nonzero.
fn divisors(n: &Integer) -> Vec<Integer> {
    let n = Integer::from(n.abs_ref());
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Integer::from(1);
    while Integer::from(&d * &d) <= n {
        if n.is_divisible(&d) {
            let other = Integer::from(n.div_exact_ref(&d));
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Rational roots with multiplicities, and the factor left after deflating them.
pub fn rational_roots(poly: &IntPoly) -> (Vec<(Rational, usize)>, IntPoly) {
    let mut rest = poly.primitive_part();
    let mut roots = Vec::new();
    let x = IntPoly::linear(1, 0);
    let mut zero_mult = 0;
    while rest.degree().is_some_and(|d| d > 0) && rest.coeff(0) == 0 {
        rest = rest.div_exact(&x).unwrap();
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::new(), zero_mult));
    }
    if rest.degree().is_none_or(|d| d == 0) {
        return (roots, rest);
    }
    let numerators = divisors(&rest.coeff(0));
    let denominators = divisors(rest.leading().unwrap());
    for q in &denominators {
        for p in &numerators {
            if Integer::from(p.gcd_ref(q)) != 1 {
                continue;
            }
            for sign in [1, -1] {
                let p = Integer::from(p * sign);
                let factor = IntPoly::new(vec![Integer::from(-&p), q.clone()]);
                let mut mult = 0;
                while let Some(quot) = rest.div_exact(&factor) {
                    rest = quot;
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((Rational::from((p, q.clone())), mult));
                }
            }
        }
    }
    (roots, rest)
}

/// Reversed coefficient list: `x^d h(1/x)` for `d` the degree of `h`.
fn reversed(h: &IntPoly) -> IntPoly {
    IntPoly::new(h.coeffs().iter().rev().cloned().collect())
}

/// Whether every complex root of `h` lies strictly inside the unit circle (Schur–Cohn).
///
/// With `a_0 = h(0)` and `a_d` the leading coefficient, `T h = a_0 h - a_d h*`
/// has degree below `d`. When `|a_d| > |a_0|`, Rouché on the unit circle gives
/// `#inside(T h) = d - #inside(h)`, so `h` is stable exactly when all roots of
/// `T h` lie outside, i.e. when the reversal of `T h` is stable.
pub fn schur_stable(h: &IntPoly) -> bool {
    let mut h = h.primitive_part();
    loop {
        let Some(d) = h.degree() else {
            return false;
        };
        if d == 0 {
            return true;
        }
        let a0 = h.coeff(0);
        if a0 == 0 {
            h = h.div_exact(&IntPoly::linear(1, 0)).unwrap();
            continue;
        }
        let ad = h.leading().unwrap().clone();
        if Integer::from(a0.abs_ref()) >= Integer::from(ad.abs_ref()) {
            return false;
        }
        let t = &h.scale(&a0) - &reversed(&h).scale(&ad);
        if t.is_zero() {
            return false;
        }
        h = reversed(&t).primitive_part();
    }
}

/// Result of locating the exponential growth rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantRoot {
    pub root: Rational,
    /// `-root` when it is also a simple root; its solutions oscillate with the same growth.
    pub companion: Option<Rational>,
    pub rational_roots: Vec<(Rational, usize)>,
    /// Factor without rational roots; all its roots have modulus below `root`.
    pub deflated: IntPoly,
}

/// Largest positive rational root of `cp`, provided it is simple and every other root is
/// smaller in modulus, except possibly a simple root at its negative.
pub fn dominant_root(cp: &IntPoly) -> Result<DominantRoot> {
    if cp.degree().is_none_or(|d| d == 0) {
        return Err(Error::Precondition("characteristic polynomial is constant".into()));
    }
    let (roots, deflated) = rational_roots(cp);
    let shown = deflated.display_in("mu").to_string();
    let Some((largest, _)) = roots.iter().max_by(|a, b| a.0.clone().abs().cmp(&b.0.clone().abs())) else {
        return Err(Error::UnsupportedAsymptotics(format!(
            "no rational root; deflated factor {shown}"
        )));
    };
    let modulus = largest.clone().abs();
    if modulus == 0 {
        return Err(Error::UnsupportedAsymptotics(format!(
            "only the root 0 is rational; deflated factor {shown}"
        )));
    }
    let mult_of = |r: &Rational| roots.iter().find(|(x, _)| x == r).map_or(0, |(_, m)| *m);
    let negative = Rational::from(-&modulus);
    let (pos_mult, neg_mult) = (mult_of(&modulus), mult_of(&negative));
    if pos_mult == 0 {
        return Err(Error::UnsupportedAsymptotics(format!(
            "dominant rational root {negative} is negative; deflated factor {shown}"
        )));
    }
    if pos_mult > 1 {
        return Err(Error::UnsupportedAsymptotics(format!(
            "dominant root {modulus} is repeated ({pos_mult}x); deflated factor {shown}"
        )));
    }
    if neg_mult > 1 {
        return Err(Error::UnsupportedAsymptotics(format!(
            "root {negative} ties the dominant modulus and is repeated; deflated factor {shown}"
        )));
    }
    if deflated.degree().is_some_and(|d| d > 0) {
        let (p, q) = (modulus.numer(), modulus.denom());
        let d = deflated.degree().unwrap() as u32;
        let scaled = IntPoly::new(
            deflated
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    c * Integer::from(p.pow(k as u32)) * Integer::from(q.pow(d - k as u32))
                })
                .collect(),
        );
        if !schur_stable(&scaled) {
            return Err(Error::UnsupportedAsymptotics(format!(
                "irrational or complex root of modulus at least {modulus}; deflated factor {shown}"
            )));
        }
    }
    Ok(DominantRoot {
        root: modulus,
        companion: (neg_mult == 1).then_some(negative),
        rational_roots: roots,
        deflated,
    })
}

/// `A(n) ~ C μ^n n^θ (1 + Σ_{j=1..J} a_j n^{-j})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticExpansion {
    pub mu: Rational,
    pub theta: Rational,
    /// `a_1..a_J`.
    pub coeffs: Vec<Rational>,
    /// Expansion at `-μ` when that root ties the dominant modulus.
    pub companion: Option<Box<AsymptoticExpansion>>,
}

impl AsymptoticExpansion {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Same expansion truncated to `j` correction terms.
    pub fn truncated(&self, j: usize) -> Self {
        Self {
            mu: self.mu.clone(),
            theta: self.theta.clone(),
            coeffs: self.coeffs.iter().take(j).cloned().collect(),
            companion: self.companion.as_ref().map(|c| Box::new(c.truncated(j))),
        }
    }
}

impl fmt::Display for AsymptoticExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C * ({})^n * n^({}) * (1", self.mu, self.theta)?;
        for (j, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            let sign = if *a < 0 { '-' } else { '+' };
            write!(f, " {sign} {}/n^{}", Rational::from(a.abs_ref()), j + 1)?;
        }
        write!(f, ")")
    }
}

/// `binom(x, t)` for rational `x`.
fn binom(x: &Rational, t: usize) -> Rational {
    let mut out = Rational::from(1);
    for u in 0..t {
        out *= Rational::from(x - u as u32);
        out /= u as u32 + 1;
    }
    out
}

/// Coefficient of `n^{D-s}` after substituting the ansatz.
fn order_coefficient(
    coeffs: &[Vec<Rational>],
    mu_powers: &[Rational],
    degree: usize,
    s: usize,
    theta: &Rational,
    a: &[Rational],
) -> Rational {
    let mut total = Rational::new();
    for (i, (p, mu_i)) in coeffs.iter().zip(mu_powers).enumerate() {
        let mut inner = Rational::new();
        for (d, c) in p.iter().enumerate().skip(degree.saturating_sub(s)) {
            if *c == 0 {
                continue;
            }
            let budget = s - (degree - d);
            for (j, aj) in a.iter().enumerate().take(budget + 1) {
                if *aj == 0 {
                    continue;
                }
                let t = budget - j;
                let shift = Rational::from(theta - j as u32);
                let it = Integer::from(i).pow(t as u32);
                inner += Rational::from(c * aj) * binom(&shift, t) * it;
            }
        }
        total += inner * mu_i;
    }
    total
}

/// Solves for `θ` and `a_1..a_J` at the given root of the characteristic polynomial.
pub fn expansion_at(op: &RecurrenceOperator, mu: &Rational, order: usize) -> Result<AsymptoticExpansion> {
    let degree = op.degree();
    let coeffs: Vec<Vec<Rational>> = op
        .coeffs()
        .iter()
        .map(|p| (0..=degree).map(|d| Rational::from(p.coeff(d))).collect())
        .collect();
    let mut mu_powers = vec![Rational::from(1)];
    for _ in 0..op.order() {
        let next = Rational::from(mu_powers.last().unwrap() * mu);
        mu_powers.push(next);
    }
    let zero_theta = Rational::new();
    let mut a = vec![Rational::from(1)];

    let top = order_coefficient(&coeffs, &mu_powers, degree, 0, &zero_theta, &a);
    if top != 0 {
        return Err(Error::Internal(format!("{mu} is not a root of the characteristic polynomial")));
    }

    let at_zero = order_coefficient(&coeffs, &mu_powers, degree, 1, &zero_theta, &a);
    let at_one = order_coefficient(&coeffs, &mu_powers, degree, 1, &Rational::from(1), &a);
    let slope = Rational::from(&at_one - &at_zero);
    if slope == 0 {
        return Err(Error::UnsupportedAsymptotics(format!(
            "the exponent equation at mu = {mu} is degenerate"
        )));
    }
    let theta = -at_zero / slope;

    for s in 2..=order + 1 {
        a.push(Rational::new());
        let e0 = order_coefficient(&coeffs, &mu_powers, degree, s, &theta, &a);
        a[s - 1] = Rational::from(1);
        let e1 = order_coefficient(&coeffs, &mu_powers, degree, s, &theta, &a);
        let pivot = Rational::from(&e1 - &e0);
        if pivot == 0 {
            return Err(Error::DegeneratePivot { index: s - 1 });
        }
        a[s - 1] = -e0 / pivot;
    }
    a.remove(0);
    Ok(AsymptoticExpansion { mu: mu.clone(), theta, coeffs: a, companion: None })
}

/// Expansion at the dominant root, plus the companion expansion when `-μ` is also a root.
pub fn expansion(op: &RecurrenceOperator, order: usize) -> Result<AsymptoticExpansion> {
    let root = dominant_root(&op.characteristic_polynomial())?;
    let mut main = expansion_at(op, &root.root, order)?;
    if let Some(c) = &root.companion {
        main.companion = Some(Box::new(expansion_at(op, c, order)?));
    }
    Ok(main)
}

/// Serialized expansion; rationals as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub mu: String,
    pub theta: String,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub companion: Option<Box<ExpansionJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<crate::constant::ConstantJson>,
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.parse::<Rational>().map_err(|e| Error::Cache(format!("bad rational {s:?}: {e}")))
}

impl AsymptoticExpansion {
    pub fn to_json(&self) -> ExpansionJson {
        ExpansionJson {
            mu: self.mu.to_string(),
            theta: self.theta.to_string(),
            coeffs: self.coeffs.iter().map(Rational::to_string).collect(),
            companion: self.companion.as_ref().map(|c| Box::new(c.to_json())),
            constant: None,
        }
    }

    pub fn from_json(json: &ExpansionJson) -> Result<Self> {
        Ok(Self {
            mu: parse_rational(&json.mu)?,
            theta: parse_rational(&json.theta)?,
            coeffs: json.coeffs.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?,
            companion: json.companion.as_ref().map(|c| Self::from_json(c).map(Box::new)).transpose()?,
        })
    }
}

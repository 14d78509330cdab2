//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

/// Polynomial `c_0 + c_1 x + ... + c_d x^d`, coefficients stored in ascending order
/// with no trailing zeros. The zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Integer>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `a x + b`.
    pub fn linear(a: i64, b: i64) -> Self {
        Self::from_i64s(&[b, a])
    }

    /// Product of a list of factors; empty product is 1.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a IntPoly>) -> Self {
        factors.into_iter().fold(Self::constant(1), |acc, f| &acc * f)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Coefficient of `x^d`, zero past the degree.
    pub fn coeff(&self, d: usize) -> Integer {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Integer> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_u64(&self, x: u64) -> Integer {
        self.eval(&Integer::from(x))
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Non-negative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(c);
            if g == 1 {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|c| *c < 0) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    pub fn scale(&self, factor: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|c| Integer::from(c * factor)).collect())
    }

    /// Exact division by an integer; `None` when some coefficient is not divisible.
    pub fn div_scalar(&self, d: &Integer) -> Option<Self> {
        if *d == 0 || self.coeffs.iter().any(|c| !c.is_divisible(d)) {
            return None;
        }
        Some(Self::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(d))).collect()))
    }

    /// Exact quotient `self / divisor` over the integers, `None` if the division leaves a
    /// remainder or needs fractions.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<Self> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?;
        let Some(sd) = self.degree() else {
            return Some(Self::zero());
        };
        if sd < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Integer::new(); sd - dd + 1];
        for shift in (0..=sd - dd).rev() {
            let top = &rem[shift + dd];
            if *top == 0 {
                continue;
            }
            if !top.is_divisible(lead) {
                return None;
            }
            let q = Integer::from(top.div_exact_ref(lead));
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= Integer::from(&q * c);
            }
            quot[shift] = q;
        }
        if rem.iter().any(|c| *c != 0) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Pseudo-remainder of `self` by `divisor` (`lc(divisor)^k · self mod divisor`).
    fn pseudo_rem(&self, divisor: &IntPoly) -> Self {
        let dd = divisor.degree().expect("pseudo-remainder by zero polynomial");
        let lead = divisor.leading().unwrap();
        let mut rem = self.clone();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let top = rem.coeffs[rd].clone();
            let mut next: Vec<Integer> = rem.coeffs.iter().map(|c| Integer::from(c * lead)).collect();
            for (i, c) in divisor.coeffs.iter().enumerate() {
                next[rd - dd + i] -= Integer::from(&top * c);
            }
            rem = Self::new(next);
        }
        rem
    }

    /// Primitive gcd with positive leading coefficient (integer content is not included).
    pub fn gcd(&self, other: &IntPoly) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Renders the polynomial in variable `var`, highest power first.
    pub fn display_in<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, var }
    }
}

struct PolyDisplay<'a> {
    poly: &'a IntPoly,
    var: &'a str,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.poly.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let negative = *c < 0;
            let abs = Integer::from(c.abs_ref());
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let show_coeff = d == 0 || abs != 1;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            if d > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "{}", self.var)?;
                if d > 1 {
                    write!(f, "^{d}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_in("x").fmt(f)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;

    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;

    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(-c)).collect())
    }
}

//! The four published case studies: hooks (2,1) and (2,2) with z = 1, 2.
//!
//! Operators are stored the way they were printed, monic in `N^L` with
//! rational-function coefficients `scalar · Π num / Π den`, and cleared to the
//! canonical integer form on demand.

use rug::{Integer, Rational};

use crate::asymptotics::AsymptoticExpansion;
use crate::constant::ConstantCandidate;
use crate::poly::IntPoly;
use crate::recurrence::RecurrenceOperator;
use crate::sequence::SeriesKey;

/// One printed coefficient `scalar · Π num_i(n) / Π den_j(n)`; factors are ascending coefficient lists.
#[derive(Clone, Copy, Debug)]
pub struct PrintedCoeff {
    pub scalar: i64,
    pub num: &'static [&'static [i64]],
    pub den: &'static [&'static [i64]],
}

const fn c(scalar: i64, num: &'static [&'static [i64]], den: &'static [&'static [i64]]) -> PrintedCoeff {
    PrintedCoeff { scalar, num, den }
}

const ONE: PrintedCoeff = c(1, &[], &[]);

#[derive(Clone, Debug)]
pub struct ReferenceCase {
    pub k: u32,
    pub l: u32,
    pub z: u32,
    /// Printed terms, starting at n = 1.
    pub terms: &'static [&'static str],
    /// Coefficients of `N^0 .. N^L`, the last one being 1.
    pub operator: &'static [PrintedCoeff],
    pub mu: i64,
    /// `θ` as (numerator, denominator).
    pub theta: (i64, i64),
    /// Printed correction coefficients `a_1..a_3` (empty where none were printed).
    pub coeffs: &'static [(i64, i64)],
    pub constant: ConstantCandidate,
}

impl ReferenceCase {
    pub fn key(&self) -> SeriesKey {
        SeriesKey { k: self.k, l: self.l, z: self.z }
    }

    pub fn label(&self) -> String {
        format!("(k,l)=({},{}), z={}", self.k, self.l, self.z)
    }

    pub fn expected_terms(&self) -> Vec<Integer> {
        self.terms.iter().map(|t| t.parse().expect("embedded term")).collect()
    }

    /// Printed operator multiplied through by the lcm of its denominators, canonicalized.
    pub fn cleared_operator(&self) -> RecurrenceOperator {
        clear_printed(self.operator)
    }

    pub fn expected_mu(&self) -> Rational {
        Rational::from(self.mu)
    }

    pub fn expected_theta(&self) -> Rational {
        Rational::from(self.theta)
    }

    pub fn expected_coeffs(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|&c| Rational::from(c)).collect()
    }

    /// Whether `exp` agrees with every printed quantity.
    pub fn matches_expansion(&self, exp: &AsymptoticExpansion) -> bool {
        exp.mu == self.expected_mu()
            && exp.theta == self.expected_theta()
            && exp.coeffs.iter().take(self.coeffs.len()).cloned().collect::<Vec<_>>() == self.expected_coeffs()
    }
}

fn factor_product(factors: &[&[i64]]) -> IntPoly {
    let polys: Vec<IntPoly> = factors.iter().map(|f| IntPoly::from_i64s(f)).collect();
    IntPoly::product(&polys)
}

/// Clears denominators of a monic printed operator.
pub fn clear_printed(coeffs: &[PrintedCoeff]) -> RecurrenceOperator {
    let dens: Vec<IntPoly> = coeffs.iter().map(|c| factor_product(c.den)).collect();
    let lcm = dens.iter().fold(IntPoly::constant(1), |acc, d| {
        let g = acc.gcd(d);
        (&acc * d).div_exact(&g).expect("gcd divides the product")
    });
    let cleared = coeffs
        .iter()
        .zip(&dens)
        .map(|(c, d)| {
            let cofactor = lcm.div_exact(d).expect("denominator divides lcm");
            (&factor_product(c.num) * &cofactor).scale(&Integer::from(c.scalar))
        })
        .collect();
    RecurrenceOperator::new(cleared, 0).expect("printed operator has order ≥ 1").canonicalize()
}

const N: &[i64] = &[0, 1];

pub const CASES: [ReferenceCase; 4] = [
    ReferenceCase {
        k: 2,
        l: 1,
        z: 1,
        terms: &[
            "1", "2", "4", "10", "26", "71", "197", "554", "1570", "4477", "12827", "36895", "106471", "308114",
            "893804", "2598314", "7567466", "22076405", "64498427", "188689685",
        ],
        operator: &[
            c(3, &[&[2, 1]], &[&[3, 1]]),
            c(-1, &[N, &[2, 1]], &[&[3, 1], &[1, 1]]),
            c(-1, &[&[9, 11, 3]], &[&[3, 1], &[1, 1]]),
            ONE,
        ],
        mu: 3,
        theta: (-1, 2),
        coeffs: &[(-3, 16), (1, 512), (135, 8192)],
        constant: ConstantCandidate { p: 1, q: 4, m: 3, pi_exp_twice: -1 },
    },
    ReferenceCase {
        k: 2,
        l: 1,
        z: 2,
        terms: &[
            "1", "2", "6", "24", "120", "695", "4403", "29540", "206244", "1483371", "10919271", "81896661",
            "623810421", "4813777566", "37561178658", "295907998908", "2350767037116",
        ],
        operator: &[
            c(-9, &[&[2, 1], &[2, 1]], &[&[3, 1], &[3, 1]]),
            c(1, &[&[18, 40, 19], &[2, 1], &[2, 1]], &[&[3, 1], &[3, 1], &[1, 1], &[1, 1]]),
            c(-1, &[&[45, 148, 159, 70, 11]], &[&[3, 1], &[3, 1], &[1, 1], &[1, 1]]),
            ONE,
        ],
        mu: 9,
        theta: (-2, 1),
        coeffs: &[(3, 4), (53, 32), (261, 64)],
        constant: ConstantCandidate { p: 9, q: 128, m: 3, pi_exp_twice: -2 },
    },
    ReferenceCase {
        k: 2,
        l: 2,
        z: 1,
        terms: &[
            "1", "2", "4", "10", "26", "76", "232", "764", "2578", "9076", "32264", "117448", "428936", "1589680",
            "5897504", "22101304", "82851218", "312935236", "1182083272", "4491680504", "17067914056",
            "65167445872",
        ],
        operator: &[
            c(128, &[N, &[-1, 1]], &[&[5, 1], &[4, 1]]),
            c(-32, &[&[-1, 4, 6]], &[&[5, 1], &[4, 1]]),
            c(8, &[&[4, 21, 11]], &[&[5, 1], &[4, 1]]),
            c(-4, &[&[-24, -7, 1]], &[&[5, 1], &[4, 1]]),
            c(-2, &[&[10, 3]], &[&[4, 1]]),
            ONE,
        ],
        mu: 4,
        theta: (-1, 1),
        coeffs: &[],
        constant: ConstantCandidate { p: 1, q: 4, m: 1, pi_exp_twice: -2 },
    },
    ReferenceCase {
        k: 2,
        l: 2,
        z: 2,
        terms: &[
            "1", "2", "6", "24", "120", "720", "5040", "40320", "361116", "3540600", "37207368", "411988896",
            "4747167568", "56428884512", "687793860000", "8559142303296", "108400653865572",
        ],
        operator: &[
            c(-512, &[&[-1, 2], &[-1, 1], N], &[&[5, 1], &[4, 1], &[4, 1]]),
            c(16, &[&[-2, 231, 711, 588, 164]], &[&[5, 1], &[1, 1], &[4, 1], &[4, 1]]),
            c(-16, &[&[296, 1003, 1146, 545, 94]], &[&[5, 1], &[1, 1], &[4, 1], &[4, 1]]),
            c(4, &[&[996, 2501, 2030, 688, 85]], &[&[5, 1], &[1, 1], &[4, 1], &[4, 1]]),
            c(-4, &[&[250, 525, 336, 87, 8]], &[&[5, 1], &[1, 1], &[4, 1], &[4, 1]]),
            ONE,
        ],
        mu: 16,
        theta: (-7, 2),
        coeffs: &[(33, 8), (2145, 128), (81723, 1024)],
        constant: ConstantCandidate { p: 1, q: 32, m: 1, pi_exp_twice: -3 },
    },
];

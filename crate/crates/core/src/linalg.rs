//! Exact kernels and ranks of rational matrices.
//!
//! Rows are scaled to primitive integer vectors up front and kept primitive
//! through Gauss–Jordan elimination, so intermediate entries stay close to the
//! size of the minors instead of accumulating unreduced fractions.

use rug::{Integer, Rational};

/// Prime modulus of the rank prefilter (largest prime below 2^32).
pub const FILTER_PRIME: u32 = 4_294_967_291;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    /// Row-major entries; panics if the length does not match the shape.
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match {rows}x{cols}");
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Rational::new(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::from(1);
        }
        m
    }

    pub fn from_integer_rows(rows: &[Vec<Integer>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(Rational::from)
            })
            .collect();
        Self::new(rows.len(), cols, entries)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let rows: Vec<Vec<Integer>> = rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect();
        Self::from_integer_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// `M · v` exactly.
    pub fn mul_vec(&self, v: &[Integer]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::new();
                for (a, x) in self.row(r).iter().zip(v) {
                    acc += Rational::from(a * x);
                }
                acc
            })
            .collect()
    }

    /// Row `r` multiplied by the lcm of its denominators.
    fn integer_row(&self, r: usize) -> Vec<Integer> {
        let row = self.row(r);
        let mut lcm = Integer::from(1);
        for v in row {
            lcm.lcm_mut(v.denom());
        }
        row.iter()
            .map(|v| v.numer() * Integer::from(lcm.div_exact_ref(v.denom())))
            .collect()
    }
}

/// How the pivot row is chosen among candidates in the current column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotPolicy {
    /// Entry with the fewest significant bits; earliest row on ties.
    #[default]
    SmallestBitSize,
    FirstNonzero,
}

/// Reduced row echelon form with integer rows.
struct Echelon {
    rows: Vec<Vec<Integer>>,
    pivots: Vec<usize>,
    cols: usize,
}

fn make_primitive(row: &mut [Integer]) {
    let mut g = Integer::new();
    for v in row.iter() {
        g.gcd_mut(v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for v in row.iter_mut() {
            v.div_exact_mut(&g);
        }
    }
}

fn echelon(m: &RationalMatrix, policy: PivotPolicy) -> Echelon {
    let mut rows: Vec<Vec<Integer>> = (0..m.rows)
        .map(|r| {
            let mut row = m.integer_row(r);
            make_primitive(&mut row);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..m.cols {
        if next == rows.len() {
            break;
        }
        let candidates = (next..rows.len()).filter(|&r| rows[r][c] != 0);
        let chosen = match policy {
            PivotPolicy::FirstNonzero => candidates.min(),
            PivotPolicy::SmallestBitSize => candidates.min_by_key(|&r| (rows[r][c].significant_bits(), r)),
        };
        let Some(p) = chosen else {
            continue;
        };
        rows.swap(next, p);
        let (head, tail) = rows.split_at_mut(next);
        let (pivot_row, tail) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if row[c] == 0 {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                *x *= &pivot_row[c];
                *x -= Integer::from(&factor * y);
            }
            make_primitive(row);
        }
        pivots.push(c);
        next += 1;
    }
    rows.truncate(pivots.len());
    Echelon { rows, pivots, cols: m.cols }
}

/// Clears denominators, divides out the content, and makes the first nonzero entry positive.
pub fn normalize_vector(v: &[Rational]) -> Vec<Integer> {
    let mut lcm = Integer::from(1);
    for x in v {
        lcm.lcm_mut(x.denom());
    }
    let mut out: Vec<Integer> = v
        .iter()
        .map(|x| x.numer() * Integer::from(lcm.div_exact_ref(x.denom())))
        .collect();
    make_primitive(&mut out);
    if out.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
        for x in &mut out {
            *x = -std::mem::take(x);
        }
    }
    out
}

impl Echelon {
    fn kernel(&self) -> Vec<Vec<Integer>> {
        let free = (0..self.cols).filter(|c| !self.pivots.contains(c));
        free.map(|f| {
            let mut v = vec![Rational::new(); self.cols];
            v[f] = Rational::from(1);
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                if row[f] != 0 {
                    v[pc] = -Rational::from((row[f].clone(), row[pc].clone()));
                }
            }
            normalize_vector(&v)
        })
        .collect()
    }
}

/// Basis of `{v : M v = 0}`, one primitive integer vector per free column.
pub fn nullspace(m: &RationalMatrix) -> Vec<Vec<Integer>> {
    nullspace_with(m, PivotPolicy::default())
}

pub fn nullspace_with(m: &RationalMatrix, policy: PivotPolicy) -> Vec<Vec<Integer>> {
    echelon(m, policy).kernel()
}

pub fn rank(m: &RationalMatrix) -> usize {
    rank_with(m, PivotPolicy::default())
}

pub fn rank_with(m: &RationalMatrix, policy: PivotPolicy) -> usize {
    echelon(m, policy).pivots.len()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

/// Rank of an integer matrix over `GF(p)`. Never exceeds the rank over the rationals, so
/// full column rank modulo `p` proves the rational kernel is trivial.
pub fn rank_mod_prime(rows: &[Vec<Integer>], p: u32) -> usize {
    let pm = u64::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| u64::from(v.mod_u(p))).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p_row) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p_row);
        let inv = inv_mod(m[rank][c], pm);
        for x in m[rank].iter_mut() {
            *x = mul_mod(*x, inv, pm);
        }
        let pivot = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = (*x + pm - mul_mod(f, *y, pm)) % pm;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_in_kernel(m: &RationalMatrix, v: &[Integer]) {
        assert!(m.mul_vec(v).iter().all(|x| *x == 0), "{v:?} not in kernel");
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = RationalMatrix::identity(2);
        assert!(nullspace(&m).is_empty());
        assert_eq!(rank(&RationalMatrix::identity(4)), 4);
    }

    #[test]
    fn rank_one() {
        let m = RationalMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        let k = nullspace(&m);
        assert_eq!(k, vec![vec![Integer::from(2), Integer::from(-1)]]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn zero_matrix() {
        let m = RationalMatrix::zeros(3, 3);
        assert_eq!(rank(&m), 0);
        assert_eq!(nullspace(&m).len(), 3);
    }

    #[test]
    fn fractional_entries() {
        let m = RationalMatrix::new(
            1,
            3,
            vec![Rational::from((1, 2)), Rational::from((1, 3)), Rational::from((-5, 6))],
        );
        let k = nullspace(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_in_kernel(&m, v);
        }
    }

    #[test]
    fn vector_normalization() {
        let v = normalize_vector(&[Rational::new(), Rational::from((-2, 3)), Rational::from((4, 9))]);
        assert_eq!(v, vec![Integer::from(0), Integer::from(3), Integer::from(-2)]);
    }

    #[test]
    fn prefilter_on_singular_matrix() {
        let rows: Vec<Vec<Integer>> = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
            .iter()
            .map(|r| r.iter().map(|&v| Integer::from(v)).collect())
            .collect();
        assert_eq!(rank_mod_prime(&rows, FILTER_PRIME), 2);
        assert_eq!(rank(&RationalMatrix::from_integer_rows(&rows)), 2);
    }

    /// Spans agree when each basis vector of one lies in the span of the other.
    fn same_span(a: &[Vec<Integer>], b: &[Vec<Integer>]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let base = RationalMatrix::from_integer_rows(b);
        let r = rank(&base);
        a.iter().all(|v| {
            let mut rows = b.to_vec();
            rows.push(v.clone());
            rank(&RationalMatrix::from_integer_rows(&rows)) == r
        })
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(prop_oneof![Just(0i64), -6i64..6], c), r)
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate(rows in small_matrix()) {
            let m = RationalMatrix::from_i64_rows(&rows);
            let k = nullspace(&m);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|x| *x == 0));
            }
            prop_assert_eq!(k.len() + rank(&m), m.cols());
        }

        #[test]
        fn pivot_policy_does_not_change_the_kernel(rows in small_matrix()) {
            let m = RationalMatrix::from_i64_rows(&rows);
            let a = nullspace_with(&m, PivotPolicy::SmallestBitSize);
            let b = nullspace_with(&m, PivotPolicy::FirstNonzero);
            prop_assert!(same_span(&a, &b));
            prop_assert!(same_span(&b, &a));
        }

        #[test]
        fn rank_ignores_row_order(rows in small_matrix(), seed in any::<u64>()) {
            let m = RationalMatrix::from_i64_rows(&rows);
            let mut shuffled = rows.clone();
            // Deterministic Fisher-Yates from the seed.
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let m2 = RationalMatrix::from_i64_rows(&shuffled);
            prop_assert_eq!(rank_with(&m, PivotPolicy::SmallestBitSize), rank_with(&m2, PivotPolicy::FirstNonzero));
        }

        #[test]
        fn modular_rank_bounds_exact_rank(rows in small_matrix()) {
            let ints: Vec<Vec<Integer>> = rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect();
            let exact = rank(&RationalMatrix::from_integer_rows(&ints));
            prop_assert!(rank_mod_prime(&ints, FILTER_PRIME) <= exact);
            prop_assert!(rank_mod_prime(&ints, 3) <= exact);
        }
    }
}

//! Young shapes restricted to a (k, l) hook and standard Young tableaux counts.
//!
//! A shape lies in the (k, l) hook when its (k+1)-th row has at most `l`
//! cells: `k` rows of unbounded length sit on top of a strip of width `l`.
//! Three independent ways of counting standard fillings are provided so the
//! fast path (hook lengths) can be checked against the others.

use std::fmt;

use rug::Integer;

use crate::error::{Error, Result};

/// Largest shape accepted by [`syt_count_bruteforce`].
pub const BRUTEFORCE_MAX_CELLS: u32 = 10;

/// An integer partition stored as its weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts that are already weakly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Self { parts })
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<u32>) -> Self {
        debug_assert!(parts.iter().all(|&p| p > 0));
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Self { parts }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of cells.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn num_rows(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Row length `i` (0-based), zero past the last row.
    pub fn row(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Transposed shape.
    pub fn conjugate(&self) -> Partition {
        let width = self.row(0);
        let parts = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Shapes obtained by deleting one removable corner cell.
    pub fn remove_corners(&self) -> impl Iterator<Item = Partition> + '_ {
        let rows = self.parts.len();
        (0..rows)
            .filter(move |&i| i + 1 == rows || self.parts[i] > self.parts[i + 1])
            .map(move |i| {
                let mut parts = self.parts.clone();
                parts[i] -= 1;
                if parts[i] == 0 {
                    parts.pop();
                }
                Partition { parts }
            })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// The (k, l) hook: shapes whose row `k+1` has at most `l` cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HookConstraint {
    pub k: u32,
    pub l: u32,
}

impl HookConstraint {
    pub fn new(k: u32, l: u32) -> Self {
        Self { k, l }
    }

    pub fn contains(&self, shape: &Partition) -> bool {
        shape.row(self.k as usize) <= self.l
    }

    /// The hook with rows and columns exchanged.
    pub fn transpose(&self) -> Self {
        Self { k: self.l, l: self.k }
    }

    /// Cap on the part at 0-based row `row`.
    fn row_cap(&self, row: usize) -> u32 {
        if row < self.k as usize {
            u32::MAX
        } else {
            self.l
        }
    }

    /// Whether `remaining` cells fit in rows `row..` with every part at most `max_part`.
    fn fillable(&self, row: usize, max_part: u32, remaining: u32) -> bool {
        if remaining == 0 {
            return true;
        }
        if max_part == 0 {
            return false;
        }
        if self.l > 0 {
            // Rows of single cells always fit.
            return true;
        }
        let free_rows = (self.k as usize).saturating_sub(row) as u64;
        u64::from(remaining) <= u64::from(max_part) * free_rows
    }
}

/// Iterator over `H(k,l;n)` in reverse lexicographic order.
///
/// Parts are generated directly under the row caps; nothing is filtered.
pub struct HookPartitions {
    hook: HookConstraint,
    current: Option<Vec<u32>>,
}

impl HookPartitions {
    /// Appends the reverse-lexicographically largest completion, if one exists.
    fn greedy_fill(&self, parts: &mut Vec<u32>, mut max_part: u32, mut remaining: u32) -> bool {
        while remaining > 0 {
            let row = parts.len();
            let mut part = max_part.min(remaining).min(self.hook.row_cap(row));
            while part > 0 && !self.hook.fillable(row + 1, part, remaining - part) {
                part -= 1;
            }
            if part == 0 {
                return false;
            }
            parts.push(part);
            remaining -= part;
            max_part = part;
        }
        true
    }

    fn advance(&self, parts: &[u32]) -> Option<Vec<u32>> {
        let mut suffix: u32 = 0;
        for j in (0..parts.len()).rev() {
            suffix += parts[j];
            let lowered = parts[j] - 1;
            if lowered == 0 {
                continue;
            }
            let mut next = parts[..j].to_vec();
            next.push(lowered);
            if self.greedy_fill(&mut next, lowered, suffix - lowered) {
                return Some(next);
            }
        }
        None
    }
}

impl Iterator for HookPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let parts = self.current.take()?;
        self.current = self.advance(&parts);
        Some(Partition::from_parts_unchecked(parts))
    }
}

/// Streams every partition of `n` in the hook, each once, reverse lexicographically.
pub fn enumerate_hook_partitions(n: u32, hook: HookConstraint) -> HookPartitions {
    let mut it = HookPartitions { hook, current: None };
    let mut first = Vec::new();
    if it.greedy_fill(&mut first, u32::MAX, n) {
        it.current = Some(first);
    }
    it
}

/// Hook length of every cell, row by row.
pub fn hook_lengths(shape: &Partition) -> Vec<Vec<u32>> {
    let conj = shape.conjugate();
    shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &row)| {
            (0..row as usize)
                .map(|j| {
                    let arm = row - j as u32 - 1;
                    let leg = conj.row(j) - i as u32 - 1;
                    arm + leg + 1
                })
                .collect()
        })
        .collect()
}

/// `f^λ` by the hook-length formula.
pub fn syt_count(shape: &Partition) -> Result<Integer> {
    let n = shape.size();
    let mut hooks = Integer::from(1);
    for h in hook_lengths(shape).iter().flatten() {
        hooks *= *h;
    }
    let factorial = Integer::from(Integer::factorial(n));
    if !factorial.is_divisible(&hooks) {
        return Err(Error::Internal(format!("hook product of {shape} does not divide {n}!")));
    }
    Ok(factorial.div_exact(&hooks))
}

/// `f^λ` by the Young–Frobenius product over shifted parts.
pub fn syt_count_frobenius(shape: &Partition) -> Integer {
    let m = shape.num_rows();
    let shifted: Vec<u32> = shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + (m - 1 - i) as u32)
        .collect();
    let mut num = Integer::from(Integer::factorial(shape.size()));
    for i in 0..m {
        for j in i + 1..m {
            num *= shifted[i] - shifted[j];
        }
    }
    let mut den = Integer::from(1);
    for &s in &shifted {
        den *= Integer::from(Integer::factorial(s));
    }
    num.div_exact(&den)
}

/// Counts standard fillings by exhaustive search over row- and column-increasing placements.
pub fn syt_count_bruteforce(shape: &Partition) -> Result<u64> {
    let n = shape.size();
    if n > BRUTEFORCE_MAX_CELLS {
        return Err(Error::SizeLimit { n, max: BRUTEFORCE_MAX_CELLS });
    }
    let cells: Vec<(usize, usize)> = shape
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(i, &row)| (0..row as usize).map(move |j| (i, j)))
        .collect();
    let mut grid: Vec<Vec<u32>> = shape.parts().iter().map(|&r| vec![0; r as usize]).collect();
    let mut used = vec![false; n as usize + 1];
    Ok(fill_cells(&cells, 0, &mut grid, &mut used))
}

fn fill_cells(cells: &[(usize, usize)], at: usize, grid: &mut [Vec<u32>], used: &mut [bool]) -> u64 {
    let Some(&(i, j)) = cells.get(at) else {
        return 1;
    };
    let left = if j > 0 { grid[i][j - 1] } else { 0 };
    let above = if i > 0 { grid[i - 1][j] } else { 0 };
    let lower = left.max(above);
    let mut count = 0;
    for v in lower + 1..used.len() as u32 {
        if used[v as usize] {
            continue;
        }
        used[v as usize] = true;
        grid[i][j] = v;
        count += fill_cells(cells, at + 1, grid, used);
        used[v as usize] = false;
    }
    grid[i][j] = 0;
    count
}

/// Transposed shape.
pub fn conjugate(shape: &Partition) -> Partition {
    shape.conjugate()
}

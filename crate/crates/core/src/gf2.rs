//! Dense bit-packed linear algebra over GF(2).
//!
//! Rows are stored as `u64` words; elimination XORs whole words. Pivots are
//! chosen deterministically (lowest column first, then the first row holding
//! a set bit in that column), so every result is reproducible.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters, index 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn xor_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    fn lowest_set_from(&self, start: usize) -> Option<usize> {
        (start..self.len).find(|&i| self.get(i))
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({self})")
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Gf2Vector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![Gf2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Gf2Vector>) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::InvalidInput(format!(
                "row {bad} has length {}, expected {cols}",
                rows[bad].len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["011", "101"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| Gf2Vector::parse(r))
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, Gf2Vector::len);
        Self::from_rows(cols, parsed)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &Gf2Vector {
        &self.rows[r]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows());
        for r in 0..self.rows() {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Appends `column` on the right, giving `[self | column]`.
    pub fn augment(&self, column: &Gf2Vector) -> Result<Self> {
        if column.len() != self.rows() {
            return Err(Error::InvalidInput(format!(
                "augmenting column has length {}, matrix has {} rows",
                column.len(),
                self.rows()
            )));
        }
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| Gf2Vector::from_bits(row.iter().chain([column.get(i)])))
            .collect();
        Ok(Self {
            cols: self.cols + 1,
            rows,
        })
    }

    pub fn mul_vec(&self, x: &Gf2Vector) -> Result<Gf2Vector> {
        if x.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(Gf2Vector::from_bits(self.rows.iter().map(|r| r.dot(x))))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// `row[target] ^= row[source]`.
    pub fn add_row(&mut self, target: usize, source: usize) {
        if target == source {
            self.rows[target] = Gf2Vector::zeros(self.cols);
            return;
        }
        let src = self.rows[source].clone();
        self.rows[target].xor_assign(&src);
    }

    /// Row rank over GF(2). The matrix is not modified.
    pub fn rank(&self) -> usize {
        let mut work = self.rows.clone();
        eliminate(&mut work, self.cols, None).len()
    }

    /// Finds `b` with `self * b = rhs`, or `None` when the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &Gf2Vector) -> Result<Option<Gf2Vector>> {
        if rhs.len() != self.rows() {
            return Err(Error::InvalidInput(format!(
                "right-hand side has length {}, matrix has {} rows",
                rhs.len(),
                self.rows()
            )));
        }
        let mut work = self.rows.clone();
        let mut target = rhs.iter().collect::<Vec<_>>();
        let pivots = eliminate(&mut work, self.cols, Some(&mut target));
        // Rows below the pivots are zero on the left; a set rhs bit there is 0 = 1.
        if target[pivots.len()..].iter().any(|&b| b) {
            return Ok(None);
        }
        // Full reduction means each pivot row touches only its pivot and free columns.
        let mut x = Gf2Vector::zeros(self.cols);
        for (row, &col) in pivots.iter().enumerate() {
            x.set(col, target[row]);
        }
        Ok(Some(x))
    }
}

/// Gauss-Jordan elimination in place. Returns the pivot column of each of
/// the leading rows. `rhs`, if given, receives the same row operations.
fn eliminate(rows: &mut [Gf2Vector], cols: usize, mut rhs: Option<&mut Vec<bool>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    let mut col = 0;
    while next < rows.len() && col < cols {
        let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
            // Skip ahead to the next column that has a set bit in the remaining rows.
            col = rows[next..]
                .iter()
                .filter_map(|r| r.lowest_set_from(col + 1))
                .min()
                .unwrap_or(cols);
            continue;
        };
        rows.swap(next, found);
        if let Some(t) = rhs.as_deref_mut() {
            t.swap(next, found);
        }
        let pivot_row = rows[next].clone();
        let pivot_bit = rhs.as_deref().map(|t| t[next]);
        for r in 0..rows.len() {
            if r != next && rows[r].get(col) {
                rows[r].xor_assign(&pivot_row);
                if let (Some(t), Some(pb)) = (rhs.as_deref_mut(), pivot_bit) {
                    t[r] ^= pb;
                }
            }
        }
        pivots.push(col);
        next += 1;
        col += 1;
    }
    pivots
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} [", self.rows(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rank by brute force: the largest subset of rows with no nonempty
    /// sub-subset XOR-ing to zero.
    fn rank_oracle(rows: &[Vec<bool>]) -> usize {
        let p = rows.len();
        let as_mask = |r: &Vec<bool>| r.iter().enumerate().fold(0u64, |m, (i, &b)| m | (u64::from(b) << i));
        let masks: Vec<u64> = rows.iter().map(as_mask).collect();
        let independent = |set: u32| {
            (1..(1u32 << p)).filter(|s| s & !set == 0).all(|s| {
                (0..p).filter(|i| s >> i & 1 == 1).fold(0u64, |acc, i| acc ^ masks[i]) != 0
            })
        };
        (0..(1u32 << p)).filter(|&s| independent(s)).map(|s| s.count_ones() as usize).max().unwrap_or(0)
    }

    fn solve_oracle(m: &Gf2Matrix, rhs: &Gf2Vector) -> Vec<Gf2Vector> {
        (0..(1u32 << m.cols()))
            .map(|x| Gf2Vector::from_bits((0..m.cols()).map(|i| x >> i & 1 == 1)))
            .filter(|x| &m.mul_vec(x).unwrap() == rhs)
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        assert_eq!(Gf2Matrix::zeros(3, 3).rank(), 0);
        let tri = Gf2Matrix::parse_rows(&["011", "101", "110"]).unwrap();
        let rows: Vec<Vec<bool>> = (0..3).map(|r| tri.row(r).iter().collect()).collect();
        assert_eq!(rank_oracle(&rows), 2);
        assert_eq!(tri.rank(), 2);
    }

    #[test]
    fn rank_leaves_input_untouched() {
        let m = Gf2Matrix::parse_rows(&["110", "011", "101"]).unwrap();
        let before = m.clone();
        let _ = m.rank();
        assert_eq!(m, before);
    }

    #[test]
    fn solve_examples() {
        let tri = Gf2Matrix::parse_rows(&["011", "101", "110"]).unwrap();
        let ones = Gf2Vector::parse("111").unwrap();
        assert!(solve_oracle(&tri, &ones).is_empty());
        assert_eq!(tri.solve(&ones).unwrap(), None);

        let id = Gf2Matrix::identity(3);
        let rhs = Gf2Vector::parse("101").unwrap();
        assert_eq!(id.solve(&rhs).unwrap(), Some(rhs.clone()));

        let single = Gf2Matrix::parse_rows(&["11"]).unwrap();
        let x = single.solve(&Gf2Vector::parse("1").unwrap()).unwrap().unwrap();
        assert_eq!(x.to_string(), "10");
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = Gf2Matrix::identity(3);
        assert!(matches!(
            m.solve(&Gf2Vector::zeros(2)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(Gf2Matrix::zeros(0, 5).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(4, 0).rank(), 0);
        let x = Gf2Matrix::zeros(0, 3).solve(&Gf2Vector::zeros(0)).unwrap();
        assert_eq!(x, Some(Gf2Vector::zeros(3)));
        assert_eq!(Gf2Matrix::zeros(2, 0).solve(&Gf2Vector::parse("01").unwrap()).unwrap(), None);
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let n = 130;
        let mut m = Gf2Matrix::zeros(n - 1, n);
        for i in 0..n - 1 {
            m.set(i, i, true);
            m.set(i, i + 1, true);
        }
        assert_eq!(m.rank(), n - 1);
        let mut rhs = Gf2Vector::zeros(n - 1);
        rhs.set(n - 2, true);
        let x = m.solve(&rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);
    }

    fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Gf2Matrix> {
        (0..=max_rows, 0..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
                Gf2Matrix::from_rows(c, rows.into_iter().map(Gf2Vector::from_bits).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_bounds_and_transpose(m in matrix_strategy(12, 12)) {
            let r = m.rank();
            prop_assert!(r <= m.rows().min(m.cols()));
            prop_assert_eq!(r, m.transpose().rank());
        }

        #[test]
        fn rank_matches_oracle(m in matrix_strategy(8, 10)) {
            let rows: Vec<Vec<bool>> = (0..m.rows()).map(|r| m.row(r).iter().collect()).collect();
            prop_assert_eq!(m.rank(), rank_oracle(&rows));
        }

        #[test]
        fn rank_invariant_under_row_operations(
            m in matrix_strategy(10, 10),
            ops in proptest::collection::vec((any::<bool>(), 0usize..10, 0usize..10), 0..20),
        ) {
            let mut w = m.clone();
            for (swap, a, b) in ops {
                if w.rows() == 0 { break; }
                let (a, b) = (a % w.rows(), b % w.rows());
                if swap { w.swap_rows(a, b) } else if a != b { w.add_row(a, b) }
            }
            prop_assert_eq!(w.rank(), m.rank());
        }

        #[test]
        fn solve_agrees_with_exhaustion(m in matrix_strategy(8, 10), seed in any::<u32>()) {
            let rhs = Gf2Vector::from_bits((0..m.rows()).map(|i| seed >> (i % 32) & 1 == 1));
            let all = solve_oracle(&m, &rhs);
            match m.solve(&rhs).unwrap() {
                Some(x) => {
                    prop_assert_eq!(m.mul_vec(&x).unwrap(), rhs.clone());
                    prop_assert!(all.contains(&x));
                }
                None => prop_assert!(all.is_empty()),
            }
            let aug = m.augment(&rhs).unwrap().rank();
            prop_assert!(aug == m.rank() || aug == m.rank() + 1);
            prop_assert_eq!(aug == m.rank(), !all.is_empty());
        }
    }
}

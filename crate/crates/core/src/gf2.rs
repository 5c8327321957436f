//! Dense bit-packed vectors and matrices over GF(2).
//!
//! Vectors store their bits little-endian in 64-bit words; bits past `len`
//! are always zero so word-level weight and equality stay valid.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A length-`n` vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![!0; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Builds a vector from a `0`/`1` string, lowest index first.
    pub fn parse(s: &str) -> Option<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        Some(Self::from_bools(bits))
    }

    /// Takes the low `len` bits of `words`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in and");
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Indices of set bits in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Restriction to the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        BitVector::from_bools(positions.iter().map(|&i| self.get(i)))
    }

    /// Big-endian hex of the integer whose bit `i` is entry `i`.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nib |= 1 << b;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Option<BitVector> {
        let mut v = BitVector::zeros(len);
        for (d, ch) in hex.chars().rev().enumerate() {
            let nib = ch.to_digit(16)?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= len {
                        return None;
                    }
                    v.set(i, true);
                }
            }
        }
        Some(v)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Reduced row-echelon form of a matrix together with its rank profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Panics if the rows disagree in length.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        Self { cols, rows }
    }

    /// Parses rows written as `0`/`1` strings.
    pub fn parse(rows: &[&str]) -> Option<Self> {
        let rows: Vec<_> = rows
            .iter()
            .map(|r| BitVector::parse(r))
            .collect::<Option<_>>()?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self { cols, rows })
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Column `j` as a vector of length `num_rows`.
    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bools(self.rows.iter().map(|r| r.get(j)))
    }

    /// `x · A`: XOR of the rows selected by `x`.
    pub fn left_mul(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.rows.len(), "left_mul length mismatch");
        let mut acc = BitVector::zeros(self.cols);
        for i in x.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    /// `x · Aᵀ`: one inner product per row.
    pub fn mul_transpose(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols, "mul_transpose length mismatch");
        BitVector::from_bools(self.rows.iter().map(|r| r.dot(x)))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.num_rows(), "matrix product shape mismatch");
        BitMatrix {
            cols: other.cols,
            rows: self.rows.iter().map(|r| other.left_mul(r)).collect(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Submatrix made of the listed columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: cols.len(),
            rows: self.rows.iter().map(|r| r.select(cols)).collect(),
        }
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(self.cols);
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Gauss–Jordan elimination restricted to the first `limit` columns.
    /// Returns pivot columns; rows beyond the rank end up zero on those columns.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..limit {
            if next == self.rows.len() {
                break;
            }
            let Some(p) = (next..self.rows.len()).find(|&i| self.rows[i].get(col)) else {
                continue;
            };
            self.rows.swap(next, p);
            let pivot = self.rows[next].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != next && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    /// Basis of `{x : x · Aᵀ = 0}` (the right null space), one vector per row.
    pub fn null_space(&self) -> BitMatrix {
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.cols);
            v.set(free, true);
            for (r, &p) in pivots.iter().enumerate() {
                if matrix.get(r, free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix::from_rows(self.cols, basis)
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let k = self.rows.len();
        if k != self.cols {
            return None;
        }
        let mut aug = BitMatrix::zeros(k, 2 * k);
        for i in 0..k {
            for j in self.rows[i].iter_ones() {
                aug.rows[i].set(j, true);
            }
            aug.rows[i].set(k + i, true);
        }
        if aug.reduce_in_place(k).len() < k {
            return None;
        }
        let inv = aug
            .rows
            .iter()
            .map(|r| BitVector::from_bools((k..2 * k).map(|j| r.get(j))))
            .collect();
        Some(BitMatrix::from_rows(k, inv))
    }

    /// Row-major hex, one string per row.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitVector::to_hex).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Solves `x · A = b` for an `l×u` matrix `A` given through its columns.
///
/// `columns` yields the `u` columns of `A` (each of length `l`) and `b` the
/// matching right-hand side bits. Free variables are set to zero. Returns
/// `None` when the system is inconsistent.
pub fn solve_by_columns<'a, I>(l: usize, columns: I, b: &[bool]) -> Option<BitVector>
where
    I: IntoIterator<Item = &'a BitVector>,
{
    // Rows of the augmented system Aᵀ | bᵀ; the extra bit sits at index l.
    let mut rows: Vec<BitVector> = columns
        .into_iter()
        .zip(b)
        .map(|(col, &bit)| {
            debug_assert_eq!(col.len(), l);
            let mut words = col.words().to_vec();
            let mut r = BitVector::from_words(l + 1, std::mem::take(&mut words));
            r.set(l, bit);
            r
        })
        .collect();
    assert_eq!(rows.len(), b.len(), "right-hand side length mismatch");

    let mut pivots = Vec::with_capacity(l.min(rows.len()));
    let mut next = 0;
    for col in 0..=l {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        if col == l {
            return None;
        }
        rows.swap(next, p);
        let pivot = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        next += 1;
    }

    let mut x = BitVector::zeros(l);
    for (r, &p) in pivots.iter().enumerate() {
        if rows[r].get(l) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Solves `x · A = b`; returns any solution (free variables zero) or `None`.
pub fn solve_row_system(a: &BitMatrix, b: &BitVector) -> Option<BitVector> {
    assert_eq!(
        b.len(),
        a.num_cols(),
        "b must have one entry per column of A"
    );
    let cols = a.transpose();
    let bits: Vec<bool> = b.iter().collect();
    solve_by_columns(a.num_rows(), cols.rows(), &bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    BitMatrix::from_rows(c, rows.into_iter().map(BitVector::from_bools).collect())
                },
            )
        })
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = BitMatrix::identity(5);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 5);
        assert_eq!(r.pivots, vec![0, 1, 2, 3, 4]);

        let z = BitMatrix::zeros(3, 4);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn duplicate_rows_have_rank_one() {
        let a = BitMatrix::parse(&["11", "11"]).unwrap();
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn solve_identity() {
        let a = BitMatrix::identity(2);
        let b = BitVector::parse("10").unwrap();
        assert_eq!(solve_row_system(&a, &b), Some(b));
    }

    #[test]
    fn solve_equal_columns_inconsistent() {
        // Columns [1;0] and [1;0]: x·A = (x0, x0), so b = (1,0) has no solution.
        let a = BitMatrix::parse(&["11", "00"]).unwrap();
        let b = BitVector::parse("10").unwrap();
        assert_eq!(solve_row_system(&a, &b), None);
    }

    #[test]
    fn solve_free_variables_zero() {
        // x·A = b with A = [[1],[1]]: solutions (1,0) and (0,1); pick the pivot one.
        let a = BitMatrix::parse(&["1", "1"]).unwrap();
        let b = BitVector::parse("1").unwrap();
        let x = solve_row_system(&a, &b).unwrap();
        assert_eq!(x, BitVector::parse("10").unwrap());
    }

    #[test]
    fn empty_system_is_consistent() {
        let a = BitMatrix::zeros(3, 0);
        let x = solve_row_system(&a, &BitVector::zeros(0)).unwrap();
        assert!(x.is_zero());
        assert_eq!(x.len(), 3);
        // Zero unknowns: consistent only for b = 0.
        let a = BitMatrix::zeros(0, 2);
        assert!(solve_row_system(&a, &BitVector::zeros(2)).is_some());
        assert!(solve_row_system(&a, &BitVector::parse("01").unwrap()).is_none());
    }

    #[test]
    fn hex_roundtrip_small() {
        let v = BitVector::parse("1100100000000001").unwrap();
        assert_eq!(v.to_hex(), "8013");
        assert_eq!(BitVector::from_hex(16, "8013"), Some(v));
        assert_eq!(BitVector::from_hex(3, "f"), None);
    }

    #[test]
    fn iter_ones_crosses_words() {
        let mut v = BitVector::zeros(200);
        for i in [0, 63, 64, 127, 199] {
            v.set(i, true);
        }
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 127, 199]);
        assert_eq!(v.weight(), 5);
        assert_eq!(BitVector::ones(70).weight(), 70);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = BitMatrix::parse(&["110", "011", "001"]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), BitMatrix::identity(3));
        assert!(BitMatrix::parse(&["11", "11"]).unwrap().inverse().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rref_idempotent_and_rank_symmetric(a in arb_matrix(128, 128)) {
            let r = a.rref();
            prop_assert_eq!(r.matrix.rref().matrix, r.matrix.clone());
            prop_assert_eq!(a.transpose().rank(), r.rank);
            prop_assert!(r.rank <= a.num_rows().min(a.num_cols()));
            // Row space preserved: every original row reduces to zero against R.
            let stacked = r.matrix.vstack(&a);
            prop_assert_eq!(stacked.rank(), r.rank);
        }

        #[test]
        fn null_space_is_orthogonal(a in arb_matrix(40, 60)) {
            let ns = a.null_space();
            prop_assert_eq!(ns.num_rows() + a.rank(), a.num_cols());
            for v in ns.rows() {
                prop_assert!(a.mul_transpose(v).is_zero());
            }
        }

        #[test]
        fn solve_matches_brute_force(a in arb_matrix(16, 20), bseed in any::<u64>()) {
            let b = BitVector::from_words(a.num_cols(), vec![bseed]);
            let l = a.num_rows();
            let brute = (0u64..1 << l)
                .map(|x| BitVector::from_words(l, vec![x]))
                .find(|x| a.left_mul(x) == b);
            match solve_row_system(&a, &b) {
                Some(x) => prop_assert_eq!(a.left_mul(&x), b),
                None => prop_assert!(brute.is_none()),
            }
        }
    }
}

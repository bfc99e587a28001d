//! The binary user-by-code matrix, its table view, and the two banded
//! constructions.
//!
//! Row `i` of an `n x k` matrix is the set of codes assigned to user `i`.
//! The Rust API indexes rows and columns from 0; every textual rendering
//! (`Display`, tables, reports) numbers users and codes from 1.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// An immutable `n x k` matrix of bits, rows packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    k: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BinaryMatrix {
    /// All-zero matrix.
    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::EmptyDimension { n, k });
        }
        let stride = k.div_ceil(WORD);
        Ok(BinaryMatrix {
            n,
            k,
            stride,
            words: vec![0; n * stride],
        })
    }

    /// All-one matrix. It has the assignment property whenever `n >= k`.
    pub fn ones(n: usize, k: usize) -> Result<Self> {
        Self::from_fn(n, k, |_, _| true)
    }

    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(n, k)?;
        for i in 0..n {
            for t in 0..k {
                if f(i, t) {
                    m.set(i, t, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of 0/1 bytes. All rows must share one length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), k)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::RowLength {
                    row: i + 1,
                    expected: k,
                    found: row.len(),
                });
            }
            for (t, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(i, t, true),
                    _ => {
                        return Err(Error::InvalidCell {
                            row: i + 1,
                            col: t + 1,
                            value: v,
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    /// Number of rows (users).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns (codes).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_square(&self) -> bool {
        self.n == self.k
    }

    #[inline]
    pub fn get(&self, i: usize, t: usize) -> bool {
        assert!(i < self.n && t < self.k, "cell ({i},{t}) out of bounds");
        self.words[i * self.stride + t / WORD] >> (t % WORD) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, t: usize, value: bool) {
        let w = &mut self.words[i * self.stride + t / WORD];
        if value {
            *w |= 1 << (t % WORD);
        } else {
            *w &= !(1 << (t % WORD));
        }
    }

    /// Copy of `self` with cell `(i, t)` set to `value`.
    pub fn with_bit(&self, i: usize, t: usize, value: bool) -> Self {
        assert!(i < self.n && t < self.k, "cell ({i},{t}) out of bounds");
        let mut m = self.clone();
        m.set(i, t, value);
        m
    }

    /// Packed words of row `i`; bit `t % 64` of word `t / 64` is cell `(i, t)`.
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Row `i` as a single mask, available when `k <= 64`.
    pub fn row_mask(&self, i: usize) -> Option<u64> {
        (self.stride == 1).then(|| self.words[i])
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> RowOnes<'_> {
        let words = self.row_words(i);
        RowOnes {
            words,
            index: 0,
            current: words[0],
        }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn column_weight(&self, t: usize) -> usize {
        (0..self.n).filter(|&i| self.get(i, t)).count()
    }

    /// Total number of ones.
    pub fn ones_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The submatrix formed by `rows`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), self.k)?;
        for (dst, &src) in rows.iter().enumerate() {
            if src >= self.n {
                return Err(Error::UserOutOfRange {
                    user: src + 1,
                    n: self.n,
                });
            }
            m.words[dst * self.stride..(dst + 1) * self.stride]
                .copy_from_slice(self.row_words(src));
        }
        Ok(m)
    }

    /// Row/column permutation: output cell `(i, t)` is input cell
    /// `(row_perm[i], col_perm[t])`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        check_permutation(row_perm, self.n)?;
        check_permutation(col_perm, self.k)?;
        Self::from_fn(self.n, self.k, |i, t| self.get(row_perm[i], col_perm[t]))
    }

    /// Total ones, heaviest row, and every row weight.
    pub fn row_weight_profile(&self) -> WeightProfile {
        let row_weights: Vec<usize> = (0..self.n).map(|i| self.row_weight(i)).collect();
        WeightProfile {
            total: row_weights.iter().sum(),
            max_row_weight: row_weights.iter().copied().max().unwrap_or(0),
            row_weights,
        }
    }
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    let bad = Error::BadPermutation {
        expected: len,
        found: perm.len(),
    };
    if perm.len() != len {
        return Err(bad);
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || seen[p] {
            return Err(bad);
        }
        seen[p] = true;
    }
    Ok(())
}

/// Iterator over the set columns of one row.
pub struct RowOnes<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for RowOnes<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.n, self.k)?;
        fmt::Display::fmt(self, f)
    }
}

/// One line per row, cells separated by single spaces.
impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for t in 0..self.k {
                if t > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(if self.get(i, t) { "1" } else { "0" })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightProfile {
    /// Total number of ones, `N`.
    pub total: usize,
    /// Largest row weight, `l_max`.
    pub max_row_weight: usize,
    pub row_weights: Vec<usize>,
}

/// Per-user code lists, the table view of a [`BinaryMatrix`].
///
/// Code numbers are 1-based and each list is kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentTable {
    k: usize,
    rows: Vec<Vec<usize>>,
}

impl AssignmentTable {
    /// Validates code ranges and per-user distinctness, then sorts each list.
    pub fn new(k: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for pair in row.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::DuplicateCode {
                        user: i + 1,
                        code: pair[0],
                    });
                }
            }
            if let Some(&code) = row.iter().find(|&&c| c == 0 || c > k) {
                return Err(Error::CodeOutOfRange {
                    user: i + 1,
                    code,
                    k,
                });
            }
        }
        Ok(AssignmentTable { k, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Codes of every user, 1-based and ascending.
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Each user's codes: the columns holding a one, numbered from 1.
    pub fn from_matrix(m: &BinaryMatrix) -> Self {
        let rows = (0..m.n())
            .map(|i| m.row_ones(i).map(|t| t + 1).collect())
            .collect();
        AssignmentTable { k: m.k(), rows }
    }

    pub fn to_matrix(&self) -> Result<BinaryMatrix> {
        let mut m = BinaryMatrix::zeros(self.rows.len(), self.k)?;
        for (i, row) in self.rows.iter().enumerate() {
            for &code in row {
                m.set(i, code - 1, true);
            }
        }
        Ok(m)
    }
}

/// Matrix to table.
pub fn to_table(m: &BinaryMatrix) -> AssignmentTable {
    AssignmentTable::from_matrix(m)
}

/// Table to matrix. Fails on an empty table.
pub fn from_table(s: &AssignmentTable) -> Result<BinaryMatrix> {
    s.to_matrix()
}

/// Row `j` of the full cyclic band: ones at columns `j, j+1, ..., j+l-1` (mod `width`).
fn band_row(j: usize, width: usize, l: usize, t: usize) -> bool {
    (t + width - j % width) % width < l
}

/// The first `n` rows of the `2k x k` l-banded matrix, `l = (k+1)/2`.
///
/// Row `j` (0-based) is the all-ones run of length `l` cyclically shifted
/// right by `j mod k`, so rows `j` and `j + k` coincide. Requires odd
/// `k >= 3` and `k <= n <= 2k`; shorter matrices keep the leading rows.
pub fn build_l_banded(k: usize, n: usize) -> Result<BinaryMatrix> {
    if k.is_multiple_of(2) {
        return Err(Error::Construction("k must be odd"));
    }
    if k < 3 {
        return Err(Error::Construction("k must be at least 3"));
    }
    if n < k || n > 2 * k {
        return Err(Error::Construction("n must satisfy k <= n <= 2k"));
    }
    let l = k.div_ceil(2);
    BinaryMatrix::from_fn(n, k, |i, t| band_row(i, k, l, t))
}

/// The first `n` rows of the augmented l-banded matrix for even `k`.
///
/// Columns `0..k-1` hold the `2(k-1) x (k-1)` banded matrix with `l = k/2`;
/// the last column is zero on rows `0..k-1` and one on rows `k-1..2(k-1)`.
/// Requires even `k >= 4` and `k <= n <= 2(k-1)`.
pub fn build_augmented_l_banded(k: usize, n: usize) -> Result<BinaryMatrix> {
    if k % 2 == 1 {
        return Err(Error::Construction("k must be even"));
    }
    if k < 4 {
        return Err(Error::Construction("k must be at least 4"));
    }
    if n < k || n > 2 * (k - 1) {
        return Err(Error::Construction("n must satisfy k <= n <= 2(k-1)"));
    }
    let width = k - 1;
    let l = k / 2;
    BinaryMatrix::from_fn(n, k, |i, t| {
        if t == width {
            i >= width
        } else {
            band_row(i, width, l, t)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn fig1_left() -> BinaryMatrix {
        let top: [[u8; 5]; 5] = [
            [1, 1, 1, 0, 0],
            [0, 1, 1, 1, 0],
            [0, 0, 1, 1, 1],
            [1, 0, 0, 1, 1],
            [1, 1, 0, 0, 1],
        ];
        let rows: Vec<_> = top.iter().chain(top.iter()).collect();
        BinaryMatrix::from_rows(&rows).unwrap()
    }

    fn fig1_right() -> BinaryMatrix {
        let top: [[u8; 5]; 5] = [
            [1, 1, 1, 0, 0],
            [0, 1, 1, 1, 0],
            [0, 0, 1, 1, 1],
            [1, 0, 0, 1, 1],
            [1, 1, 0, 0, 1],
        ];
        let rows: Vec<Vec<u8>> = (0..10)
            .map(|i| {
                let mut r = top[i % 5].to_vec();
                r.push(u8::from(i >= 5));
                r
            })
            .collect();
        BinaryMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn banded_5_10_layout() {
        let m = build_l_banded(5, 10).unwrap();
        assert_eq!(m, fig1_left());
        assert_eq!(
            m.row_ones(5).collect::<Vec<_>>(),
            m.row_ones(0).collect::<Vec<_>>()
        );
    }

    #[test]
    fn banded_smallest() {
        let m = build_l_banded(3, 3).unwrap();
        let expected = BinaryMatrix::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn banded_k7_n11() {
        let m = build_l_banded(7, 11).unwrap();
        assert_eq!((m.n(), m.k()), (11, 7));
        for i in 0..11 {
            assert_eq!(m.row_weight(i), 4);
        }
        assert_eq!(m.row_words(7), m.row_words(0));
        // row 4 (1-based 5) wraps: columns 5,6,7,1
        assert_eq!(m.row_ones(4).collect::<Vec<_>>(), vec![0, 4, 5, 6]);
    }

    #[test]
    fn banded_rejects_bad_parameters() {
        assert_eq!(
            build_l_banded(4, 8),
            Err(Error::Construction("k must be odd"))
        );
        assert_eq!(
            build_l_banded(1, 2),
            Err(Error::Construction("k must be at least 3"))
        );
        assert!(build_l_banded(5, 4).is_err());
        assert!(build_l_banded(5, 11).is_err());
    }

    #[test]
    fn augmented_6_10_layout() {
        let m = build_augmented_l_banded(6, 10).unwrap();
        assert_eq!(m, fig1_right());
        assert_eq!(m.ones_count(), 35);
    }

    #[test]
    fn augmented_k4() {
        let m = build_augmented_l_banded(4, 4).unwrap();
        let expected =
            BinaryMatrix::from_rows(&[[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 0, 1]])
                .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn augmented_rejects_bad_parameters() {
        assert_eq!(
            build_augmented_l_banded(5, 8),
            Err(Error::Construction("k must be even"))
        );
        assert!(build_augmented_l_banded(2, 2).is_err());
        assert!(build_augmented_l_banded(6, 11).is_err());
        assert!(build_augmented_l_banded(6, 5).is_err());
    }

    #[test]
    fn table_examples() {
        let m = BinaryMatrix::from_rows(&[[1, 0, 1, 0, 1], [0, 0, 0, 0, 0]]).unwrap();
        let s = to_table(&m);
        assert_eq!(s.rows(), &[vec![1, 3, 5], vec![]]);
        assert_eq!(to_table(&fig1_left()).rows()[1], vec![2, 3, 4]);

        let s = AssignmentTable::new(5, vec![vec![5, 1, 3]]).unwrap();
        assert_eq!(
            from_table(&s).unwrap(),
            BinaryMatrix::from_rows(&[[1, 0, 1, 0, 1]]).unwrap()
        );
        let right = fig1_right();
        assert_eq!(from_table(&to_table(&right)).unwrap(), right);
    }

    #[test]
    fn table_rejections() {
        let empty = AssignmentTable::new(5, vec![]).unwrap();
        assert!(matches!(
            from_table(&empty),
            Err(Error::EmptyDimension { .. })
        ));
        assert_eq!(
            AssignmentTable::new(5, vec![vec![1], vec![6]]),
            Err(Error::CodeOutOfRange {
                user: 2,
                code: 6,
                k: 5
            })
        );
        assert_eq!(
            AssignmentTable::new(5, vec![vec![0]]),
            Err(Error::CodeOutOfRange {
                user: 1,
                code: 0,
                k: 5
            })
        );
        assert_eq!(
            AssignmentTable::new(5, vec![vec![2, 4, 2]]),
            Err(Error::DuplicateCode { user: 1, code: 2 })
        );
    }

    #[test]
    fn from_rows_rejections() {
        assert!(matches!(
            BinaryMatrix::from_rows(&[vec![1, 0], vec![1]]),
            Err(Error::RowLength { row: 2, .. })
        ));
        assert!(matches!(
            BinaryMatrix::from_rows(&[[1, 2]]),
            Err(Error::InvalidCell { value: 2, .. })
        ));
    }

    #[test]
    fn permute_identity_and_errors() {
        let m = fig1_left();
        let rows: Vec<usize> = (0..10).collect();
        let cols: Vec<usize> = (0..5).collect();
        assert_eq!(m.permute(&rows, &cols).unwrap(), m);
        assert!(m.permute(&rows[..9], &cols).is_err());
        assert!(m.permute(&rows, &[0, 1, 2, 3, 3]).is_err());
    }

    #[test]
    fn weight_profiles() {
        let p = fig1_left().row_weight_profile();
        assert_eq!((p.total, p.max_row_weight), (30, 3));
        let p = BinaryMatrix::ones(5, 5).unwrap().row_weight_profile();
        assert_eq!((p.total, p.max_row_weight), (25, 5));
        let p = fig1_right().row_weight_profile();
        assert_eq!((p.total, p.max_row_weight), (35, 4));
        assert_eq!(p.row_weights, vec![3, 3, 3, 3, 3, 4, 4, 4, 4, 4]);
    }

    #[test]
    fn banded_full_structure() {
        for k in (3..=21).step_by(2) {
            let m = build_l_banded(k, 2 * k).unwrap();
            let l = k.div_ceil(2);
            for j in 0..2 * k {
                assert_eq!(m.row_weight(j), l);
                // ones form one cyclic run: exactly one 0->1 transition
                let rises = (0..k)
                    .filter(|&t| m.get(j, t) && !m.get(j, (t + k - 1) % k))
                    .count();
                assert_eq!(rises, 1);
            }
            for t in 0..k {
                assert_eq!(m.column_weight(t), k + 1);
            }
            for j in 0..k {
                assert_eq!(m.row_words(j), m.row_words(j + k));
            }
            assert_eq!(m.ones_count(), k * (k + 1));
        }
        for k in (4..=20).step_by(2) {
            let m = build_augmented_l_banded(k, 2 * (k - 1)).unwrap();
            assert_eq!(m.ones_count(), (k - 1) * (k + 1));
        }
    }

    #[test]
    fn wide_rows_span_words() {
        let m = build_l_banded(131, 131).unwrap();
        assert_eq!(m.row_mask(0), None);
        let ones: Vec<usize> = m.row_ones(100).collect();
        assert_eq!(ones.len(), 66);
        assert_eq!(ones[0], 0);
        assert_eq!(*ones.last().unwrap(), 130);
    }

    fn arb_matrix() -> impl Strategy<Value = BinaryMatrix> {
        (1usize..10, 1usize..70).prop_flat_map(|(n, k)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, k), n)
                .prop_map(|rows| BinaryMatrix::from_rows(&rows).unwrap())
        })
    }

    fn arb_perm(len: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..len).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn table_round_trip(m in arb_matrix()) {
            let s = to_table(&m);
            prop_assert_eq!(&from_table(&s).unwrap(), &m);
            prop_assert_eq!(to_table(&from_table(&s).unwrap()), s);
        }

        #[test]
        fn permute_composes(
            (m, r1, r2, c1, c2) in arb_matrix().prop_flat_map(|m| {
                let (n, k) = (m.n(), m.k());
                (Just(m), arb_perm(n), arb_perm(n), arb_perm(k), arb_perm(k))
            })
        ) {
            let twice = m.permute(&r1, &c1).unwrap().permute(&r2, &c2).unwrap();
            let rows: Vec<usize> = r2.iter().map(|&i| r1[i]).collect();
            let cols: Vec<usize> = c2.iter().map(|&t| c1[t]).collect();
            prop_assert_eq!(twice, m.permute(&rows, &cols).unwrap());
        }
    }
}

//! Deciding the assignment property and finding concrete code assignments.
//!
//! A matrix has the assignment property when every choice of `k` users can
//! be given pairwise distinct codes out of their own rows. By Hall's theorem
//! this holds iff no set of `m <= k` rows has fewer than `m` non-null
//! columns when stacked. Two exact deciders are provided and are expected to
//! agree: a scan over column subsets ([`verify_exhaustive`]) and an
//! enumeration of row subsets with a matching test on each
//! ([`verify_bruteforce`]).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitmatrix::BinaryMatrix;
use crate::error::{Error, Result};

/// Largest `k` accepted by [`verify_exhaustive`]; the scan allocates `2^k` counters.
pub const EXHAUSTIVE_MAX_K: usize = 22;

/// Largest number of row subsets [`verify_bruteforce`] will enumerate.
/// Covers every instance with `n <= 16`.
pub const BRUTEFORCE_MAX_SUBSETS: u64 = 1_000_000;

/// Injective user-to-code map supported on 1-cells. Pairs are `(user, code)`,
/// 0-based, sorted by user.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CodeAssignment {
    pub pairs: Vec<(usize, usize)>,
}

impl CodeAssignment {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn code_of(&self, user: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == user).map(|p| p.1)
    }

    /// True when users are distinct, codes are distinct and every pair is a 1-cell of `m`.
    pub fn is_valid_for(&self, m: &BinaryMatrix) -> bool {
        let mut users = vec![false; m.n()];
        let mut codes = vec![false; m.k()];
        self.pairs.iter().all(|&(i, t)| {
            if i >= m.n() || t >= m.k() || users[i] || codes[t] || !m.get(i, t) {
                return false;
            }
            users[i] = true;
            codes[t] = true;
            true
        })
    }
}

/// `user i -> code t` per line, 1-based.
impl fmt::Display for CodeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(i, t) in &self.pairs {
            writeln!(f, "user {} -> code {}", i + 1, t + 1)?;
        }
        Ok(())
    }
}

/// A set of rows whose stacked supports cover fewer columns than there are rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallViolation {
    /// Violating rows, 0-based, ascending.
    pub rows: Vec<usize>,
    /// Union of their supports (the non-null columns), 0-based, ascending.
    pub cols: Vec<usize>,
}

impl HallViolation {
    fn from_rows(m: &BinaryMatrix, mut rows: Vec<usize>) -> Self {
        rows.sort_unstable();
        let cols = non_null_columns(m, &rows);
        HallViolation { rows, cols }
    }

    /// Re-checks the certificate against `m` from scratch.
    pub fn is_valid_for(&self, m: &BinaryMatrix) -> bool {
        let mut seen = vec![false; m.n()];
        for &r in &self.rows {
            if r >= m.n() || seen[r] {
                return false;
            }
            seen[r] = true;
        }
        self.rows.len() <= m.k()
            && non_null_columns(m, &self.rows) == self.cols
            && self.cols.len() < self.rows.len()
    }
}

impl fmt::Display for HallViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("rows=")?;
        write_list(f, &self.rows)?;
        f.write_str(" cols=")?;
        write_list(f, &self.cols)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[usize]) -> fmt::Result {
    for (idx, v) in items.iter().enumerate() {
        if idx > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", v + 1)?;
    }
    Ok(())
}

/// Columns holding a one in at least one of `rows`.
pub fn non_null_columns(m: &BinaryMatrix, rows: &[usize]) -> Vec<usize> {
    let mut cols = vec![false; m.k()];
    for &r in rows {
        for t in m.row_ones(r) {
            cols[t] = true;
        }
    }
    cols.iter()
        .enumerate()
        .filter_map(|(t, &c)| c.then_some(t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::BruteForce => "bruteforce",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub method: Method,
    /// `None` when the property holds.
    pub witness: Option<HallViolation>,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// `HOLDS`, or `FAILS rows=<..> cols=<..>` with 1-based indices.
impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => f.write_str("HOLDS"),
            Some(w) => write!(f, "FAILS {w}"),
        }
    }
}

fn require_tall(m: &BinaryMatrix) -> Result<()> {
    if m.n() < m.k() {
        return Err(Error::TooFewRows { n: m.n(), k: m.k() });
    }
    Ok(())
}

/// Decides the assignment property by scanning column subsets.
///
/// The property fails iff some column set `C` with `|C| <= k-1` contains the
/// support of more than `|C|` rows.
///
/// If some rows `T`, `|T| = m <= k`, stack to a column union `U` with
/// `|U| < m`, then `|U| <= k-1` and all `m > |U|` rows of `T` have support
/// inside `U`, so `C = U` qualifies. Conversely, given such a `C`, any
/// `|C|+1 <= k` of the rows inside it stack to at most `|C|` non-null
/// columns, which violates the condition for `m = |C|+1`.
///
/// Rows-inside-`C` counts come from a subset-sum transform over the `2^k`
/// column masks, so the cost is `O(2^k k + n)` regardless of `n`.
pub fn verify_exhaustive(m: &BinaryMatrix) -> Result<VerificationReport> {
    require_tall(m)?;
    let k = m.k();
    if k > EXHAUSTIVE_MAX_K {
        return Err(Error::TooLarge {
            what: "k for the exhaustive verifier",
            limit: EXHAUSTIVE_MAX_K as u64,
            found: k as u64,
        });
    }
    let full = 1usize << k;
    let masks: Vec<usize> = (0..m.n())
        .map(|i| m.row_mask(i).expect("k <= 64") as usize)
        .collect();
    let mut inside = vec![0u32; full];
    for &s in &masks {
        inside[s] += 1;
    }
    for bit in 0..k {
        let b = 1 << bit;
        for c in 0..full {
            if c & b != 0 {
                inside[c] += inside[c ^ b];
            }
        }
    }
    let violating = (0..full).find(|&c| {
        let size = c.count_ones();
        (size as usize) < k && inside[c] > size
    });
    let witness = violating.map(|c| {
        let take = c.count_ones() as usize + 1;
        let rows = (0..m.n())
            .filter(|&i| masks[i] & !c == 0)
            .take(take)
            .collect();
        HallViolation::from_rows(m, rows)
    });
    Ok(VerificationReport {
        method: Method::Exhaustive,
        witness,
    })
}

/// `C(n, r)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Decides the assignment property by trying every `k`-subset of rows.
///
/// Each subset must admit a perfect matching of rows to columns through
/// 1-cells, i.e. some row permutation of it has an all-ones diagonal.
pub fn verify_bruteforce(m: &BinaryMatrix) -> Result<VerificationReport> {
    require_tall(m)?;
    let (n, k) = (m.n(), m.k());
    let subsets = binomial(n, k);
    if subsets > BRUTEFORCE_MAX_SUBSETS {
        return Err(Error::TooLarge {
            what: "number of k-row subsets",
            limit: BRUTEFORCE_MAX_SUBSETS,
            found: subsets,
        });
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut matcher = Matcher::new(m);
    loop {
        if let Matching::Blocked(w) = matcher.run(&subset) {
            return Ok(VerificationReport {
                method: Method::BruteForce,
                witness: Some(w),
            });
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    Ok(VerificationReport {
        method: Method::BruteForce,
        witness: None,
    })
}

/// Advances `c` to the next `|c|`-combination of `0..n` in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    let Some(i) = (0..r).rev().find(|&i| c[i] < n - r + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..r {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Result of [`find_assignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matching {
    Assigned(CodeAssignment),
    /// No assignment exists; the certificate is a subset of the requested users.
    Blocked(HallViolation),
}

impl Matching {
    pub fn assignment(&self) -> Option<&CodeAssignment> {
        match self {
            Matching::Assigned(a) => Some(a),
            Matching::Blocked(_) => None,
        }
    }
}

/// Checks a user selection: distinct, in range, at most `k` of them.
/// Returns the users sorted ascending.
pub fn validate_users(m: &BinaryMatrix, users: &[usize]) -> Result<Vec<usize>> {
    if users.len() > m.k() {
        return Err(Error::TooManyUsers {
            requested: users.len(),
            k: m.k(),
        });
    }
    let mut sorted = users.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateUser { user: w[0] + 1 });
        }
    }
    if let Some(&u) = sorted.last().filter(|&&u| u >= m.n()) {
        return Err(Error::UserOutOfRange {
            user: u + 1,
            n: m.n(),
        });
    }
    Ok(sorted)
}

/// Gives each selected user a distinct code from its own row, or reports
/// a Hall violation among them.
///
/// Augmenting-path matching: users are inserted in ascending order and
/// columns are probed in ascending order, so the result is a function of
/// the matrix and the user set alone. Cost `O(|users| * N)`.
pub fn find_assignment(m: &BinaryMatrix, users: &[usize]) -> Result<Matching> {
    let users = validate_users(m, users)?;
    Ok(Matcher::new(m).run(&users))
}

struct Matcher<'a> {
    m: &'a BinaryMatrix,
    owner: Vec<Option<usize>>,
    seen: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(m: &'a BinaryMatrix) -> Self {
        Matcher {
            m,
            owner: vec![None; m.k()],
            seen: vec![false; m.k()],
        }
    }

    fn run(&mut self, users: &[usize]) -> Matching {
        self.owner.fill(None);
        for &u in users {
            self.seen.fill(false);
            if !self.augment(u) {
                // The failed search visited exactly the columns adjacent to
                // the alternating tree rooted at `u`; all are matched to tree
                // rows, so the tree has one more row than columns.
                let mut rows = vec![u];
                rows.extend(
                    self.seen
                        .iter()
                        .zip(&self.owner)
                        .filter(|(&s, _)| s)
                        .map(|(_, o)| o.expect("visited column is matched")),
                );
                return Matching::Blocked(HallViolation::from_rows(self.m, rows));
            }
        }
        let mut pairs: Vec<(usize, usize)> = self
            .owner
            .iter()
            .enumerate()
            .filter_map(|(t, o)| o.map(|i| (i, t)))
            .collect();
        pairs.sort_unstable();
        Matching::Assigned(CodeAssignment { pairs })
    }

    fn augment(&mut self, row: usize) -> bool {
        let m = self.m;
        for t in m.row_ones(row) {
            if self.seen[t] {
                continue;
            }
            self.seen[t] = true;
            if self.owner[t].is_none_or(|r| self.augment(r)) {
                self.owner[t] = Some(row);
                return true;
            }
        }
        false
    }
}

/// True iff every diagonal cell of the square matrix is one.
pub fn check_diagonalized(m: &BinaryMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { n: m.n(), k: m.k() });
    }
    Ok((0..m.n()).all(|i| m.get(i, i)))
}

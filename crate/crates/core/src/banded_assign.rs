//! Shift-based code assignment for the full `2k x k` l-banded matrix.
//!
//! Rows `j` and `j + k` of the banded matrix are duplicates. Relative to a
//! chosen set of `k` rows each duplicate pair is void (neither chosen),
//! single (one chosen) or double (both chosen), and the upper `k x k` block
//! serves as `k` slots with slot `s` needing a row that has a one in column
//! `s`. Row `j` has ones in columns `j .. j+l-1` (cyclically), so a row may
//! sit in its own slot or up to `l-1` slots below it.
//!
//! Single rows stay in (or move up to) their own slot. Each double pair
//! pushes its spare copy downward into the run of single rows beneath it,
//! every row of the run sliding down by one, until a void slot absorbs the
//! excess. Pushed rows are queued first-in first-out, which is exactly the
//! per-cluster shift when double/void couples do not nest and still moves
//! every row at most once when they do.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitmatrix::{build_l_banded, BinaryMatrix};
use crate::error::{Error, Result};
use crate::hall::{find_assignment, validate_users, CodeAssignment, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowLabel {
    /// Neither copy chosen.
    Void,
    /// Exactly one copy chosen.
    Single,
    /// Both copies chosen.
    Double,
}

impl RowLabel {
    pub fn letter(self) -> char {
        match self {
            RowLabel::Void => 'V',
            RowLabel::Single => 'S',
            RowLabel::Double => 'D',
        }
    }
}

/// Labels of all `2k` rows for one chosen set. Rows `j` and `j + k` always
/// carry the same label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLabels {
    k: usize,
    labels: Vec<RowLabel>,
    chosen: Vec<bool>,
}

impl RowLabels {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Label of row `j` in `0..2k`.
    pub fn label(&self, j: usize) -> RowLabel {
        self.labels[j]
    }

    pub fn is_chosen(&self, j: usize) -> bool {
        self.chosen[j]
    }

    /// Labels of the upper block, one per slot.
    pub fn upper(&self) -> &[RowLabel] {
        &self.labels[..self.k]
    }

    pub fn count_upper(&self, label: RowLabel) -> usize {
        self.upper().iter().filter(|&&l| l == label).count()
    }

    /// Chosen copies of pair `s`, upper copy first.
    fn copies(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        [s, s + self.k].into_iter().filter(|&j| self.chosen[j])
    }
}

fn check_selection(k: usize, chosen: &[usize]) -> Result<()> {
    if k.is_multiple_of(2) || k < 3 {
        return Err(Error::Construction("k must be odd and at least 3"));
    }
    if chosen.len() != k {
        return Err(Error::SelectionSize {
            expected: k,
            found: chosen.len(),
        });
    }
    Ok(())
}

/// Labels every row of the `2k`-row banded matrix relative to `chosen`
/// (`k` distinct row indices in `0..2k`).
pub fn label_rows(k: usize, chosen: &[usize]) -> Result<RowLabels> {
    check_selection(k, chosen)?;
    let mut picked = vec![false; 2 * k];
    for &j in chosen {
        if j >= 2 * k {
            return Err(Error::UserOutOfRange {
                user: j + 1,
                n: 2 * k,
            });
        }
        if picked[j] {
            return Err(Error::DuplicateUser { user: j + 1 });
        }
        picked[j] = true;
    }
    let mut labels = vec![RowLabel::Void; 2 * k];
    for s in 0..k {
        let label = match (picked[s], picked[s + k]) {
            (false, false) => RowLabel::Void,
            (true, true) => RowLabel::Double,
            _ => RowLabel::Single,
        };
        labels[s] = label;
        labels[s + k] = label;
    }
    Ok(RowLabels {
        k,
        labels,
        chosen: picked,
    })
}

/// Double/void couples and the slot runs they span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPlan {
    k: usize,
    /// `(double slot, void slot)` pairs, 0-based, by ascending double slot.
    pub couples: Vec<(usize, usize)>,
}

impl ClusterPlan {
    /// Slots from the double slot down to its void slot, cyclically, inclusive.
    pub fn cluster(&self, idx: usize) -> Vec<usize> {
        let (d, v) = self.couples[idx];
        let len = (v + self.k - d) % self.k + 1;
        (0..len).map(|o| (d + o) % self.k).collect()
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        (0..self.couples.len()).map(|i| self.cluster(i)).collect()
    }

    /// True when no slot lies in two clusters. Then every cluster holds only
    /// its double, its void and single rows between them.
    pub fn is_disjoint(&self) -> bool {
        let mut used = vec![false; self.k];
        for c in self.clusters() {
            for s in c {
                if used[s] {
                    return false;
                }
                used[s] = true;
            }
        }
        true
    }
}

/// Couples each double slot with a void slot: doubles are taken in
/// ascending slot order and each claims the nearest unclaimed void slot
/// found scanning downward, wrapping from the last slot to the first.
pub fn plan_clusters(labels: &RowLabels) -> Result<ClusterPlan> {
    let k = labels.k();
    for s in 0..k {
        if labels.label(s) != labels.label(s + k) {
            return Err(Error::InconsistentLabels(
                "duplicate rows labeled differently",
            ));
        }
    }
    let doubles = labels.count_upper(RowLabel::Double);
    if doubles != labels.count_upper(RowLabel::Void) {
        return Err(Error::InconsistentLabels("double and void counts differ"));
    }
    let upper = labels.upper();
    let mut claimed = vec![false; k];
    let mut couples = Vec::with_capacity(doubles);
    for d in (0..k).filter(|&s| upper[s] == RowLabel::Double) {
        let v = (1..k)
            .map(|o| (d + o) % k)
            .find(|&s| upper[s] == RowLabel::Void && !claimed[s])
            .expect("equal double and void counts leave a void slot");
        claimed[v] = true;
        couples.push((d, v));
    }
    Ok(ClusterPlan { k, couples })
}

/// One row move. `row` and `from` are positions in the `2k`-row matrix,
/// `to` is a slot of the upper block; all 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relocation {
    pub row: usize,
    pub from: usize,
    pub to: usize,
}

/// `move row <j> : slot <a> -> slot <b>`, 1-based.
impl fmt::Display for Relocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "move row {} : slot {} -> slot {}",
            self.row + 1,
            self.from + 1,
            self.to + 1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastAssignment {
    /// The `k x k` result; row `s` is the content of `placement[s]`.
    pub matrix: BinaryMatrix,
    /// Row of the `2k`-row matrix placed in each slot.
    pub placement: Vec<usize>,
    /// Moves in destination-slot order. No row appears twice.
    pub trace: Vec<Relocation>,
    pub plan: ClusterPlan,
    /// Slot visits plus queue operations: a count of elementary steps,
    /// as opposed to `trace.len()` which counts row moves.
    pub steps: usize,
}

impl FastAssignment {
    /// Reads the diagonal: the row in slot `s` gets code `s`.
    pub fn code_assignment(&self) -> CodeAssignment {
        let mut pairs: Vec<(usize, usize)> = self
            .placement
            .iter()
            .enumerate()
            .map(|(s, &row)| (row, s))
            .collect();
        pairs.sort_unstable();
        CodeAssignment { pairs }
    }
}

/// Permutes `k` chosen rows of the `2k x k` banded matrix (odd `k >= 3`)
/// into a `k x k` matrix with an all-ones diagonal, moving each row at most
/// once.
pub fn fast_assign(k: usize, chosen: &[usize]) -> Result<FastAssignment> {
    let labels = label_rows(k, chosen)?;
    let plan = plan_clusters(&labels)?;
    let l = k.div_ceil(2);

    // Net rows each pair contributes beyond its own slot: +1 double,
    // 0 single, -1 void. Sweeping from just after the lowest prefix sum
    // keeps the number of pushed-down rows non-negative all the way round.
    let mut prefix = 0isize;
    let mut lowest = (0isize, k - 1);
    for s in 0..k {
        prefix += match labels.label(s) {
            RowLabel::Void => -1,
            RowLabel::Single => 0,
            RowLabel::Double => 1,
        };
        if prefix < lowest.0 {
            lowest = (prefix, s);
        }
    }
    let start = (lowest.1 + 1) % k;

    let mut placement = vec![usize::MAX; k];
    let mut pending: VecDeque<usize> = VecDeque::new();
    let mut steps = 0;
    for offset in 0..k {
        let s = (start + offset) % k;
        let mut copies = labels.copies(s);
        let placed = match pending.pop_front() {
            Some(row) => row,
            None => copies
                .next()
                .expect("a void slot is always preceded by a pushed-down row"),
        };
        placement[s] = placed;
        pending.extend(copies);
        steps += 1 + pending.len();
    }
    assert!(pending.is_empty(), "every pushed-down row finds a slot");

    let mut trace: Vec<Relocation> = placement
        .iter()
        .enumerate()
        .filter(|&(s, &row)| row != s)
        .map(|(s, &row)| Relocation {
            row,
            from: row,
            to: s,
        })
        .collect();
    trace.sort_unstable_by_key(|r| r.to);
    steps += trace.len();

    let banded = build_l_banded(k, 2 * k)?;
    for (s, &row) in placement.iter().enumerate() {
        assert!(
            (s + k - row % k) % k < l,
            "row {row} placed {s}: outside its band"
        );
    }
    let matrix = banded.select_rows(&placement)?;
    Ok(FastAssignment {
        matrix,
        placement,
        trace,
        plan,
        steps,
    })
}

/// Which algorithm produced a [`Dispatch`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    /// The banded shift algorithm; carries its move trace.
    Banded(Vec<Relocation>),
    /// Augmenting-path matching.
    Matching,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub route: Route,
    pub outcome: Matching,
}

impl Dispatch {
    pub fn relocations(&self) -> Option<usize> {
        match &self.route {
            Route::Banded(trace) => Some(trace.len()),
            Route::Matching => None,
        }
    }
}

/// True when `m` is the full `2k x k` banded matrix for an odd `k >= 3`.
pub fn is_full_banded(m: &BinaryMatrix) -> bool {
    let k = m.k();
    k % 2 == 1 && k >= 3 && m.n() == 2 * k && build_l_banded(k, 2 * k).is_ok_and(|b| &b == m)
}

/// Assigns codes to `chosen` users of `m`. The banded shift algorithm
/// handles a full selection of the full banded matrix; everything else goes
/// through matching.
pub fn assign_with_fallback(m: &BinaryMatrix, chosen: &[usize]) -> Result<Dispatch> {
    validate_users(m, chosen)?;
    if chosen.len() == m.k() && is_full_banded(m) {
        let fast = fast_assign(m.k(), chosen)?;
        return Ok(Dispatch {
            outcome: Matching::Assigned(fast.code_assignment()),
            route: Route::Banded(fast.trace),
        });
    }
    Ok(Dispatch {
        route: Route::Matching,
        outcome: find_assignment(m, chosen)?,
    })
}

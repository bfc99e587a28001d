//! The ones-count lower bound for the assignment property.
//!
//! If a matrix has the property, no column can have `k` or more zeros
//! (those `k` rows could never all be served), so every column has at least
//! `n-k+1` ones and `N >= k(n-k+1)`. A matrix attaining the bound is optimal.

use alloc::vec::Vec;
use core::fmt;

use crate::bitmatrix::{build_augmented_l_banded, BinaryMatrix};
use crate::error::{Error, Result};
use crate::hall::verify_exhaustive;

/// Exact non-negative fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    /// Panics on a zero denominator.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityReport {
    pub n: usize,
    pub k: usize,
    /// Total ones `N`.
    pub ones: usize,
    /// `k(n-k+1)`.
    pub lower_bound: usize,
    pub max_row_weight: usize,
    /// `ceil(k(n-k+1) / n)`: no row set can do with a lighter heaviest row.
    pub per_row_bound: usize,
    pub is_optimal: bool,
    /// `N / lower_bound`.
    pub ratio: Ratio,
}

impl OptimalityReport {
    /// `n * l_max >= k(n-k+1)`.
    pub fn row_bound_met(&self) -> bool {
        self.n * self.max_row_weight >= self.lower_bound
    }
}

impl fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ones: {}", self.ones)?;
        writeln!(f, "lower_bound: {}", self.lower_bound)?;
        writeln!(f, "l_max: {}", self.max_row_weight)?;
        writeln!(f, "per_row_bound: {}", self.per_row_bound)?;
        writeln!(f, "optimal: {}", self.is_optimal)?;
        writeln!(f, "ratio: {}", self.ratio)
    }
}

/// `k(n-k+1)`, the fewest ones any `n x k` matrix with the property can have.
pub fn lower_bound(n: usize, k: usize) -> usize {
    k * (n - k + 1)
}

fn require_tall(m: &BinaryMatrix) -> Result<()> {
    if m.n() < m.k() {
        return Err(Error::TooFewRows { n: m.n(), k: m.k() });
    }
    Ok(())
}

/// Counts ones and compares against the bound. Does not verify the property.
pub fn analyze(m: &BinaryMatrix) -> Result<OptimalityReport> {
    require_tall(m)?;
    let (n, k) = (m.n(), m.k());
    let profile = m.row_weight_profile();
    let bound = lower_bound(n, k);
    Ok(OptimalityReport {
        n,
        k,
        ones: profile.total,
        lower_bound: bound,
        max_row_weight: profile.max_row_weight,
        per_row_bound: bound.div_ceil(n),
        is_optimal: profile.total == bound,
        ratio: Ratio::new(profile.total as u64, bound as u64),
    })
}

/// Columns (0-based) with at least `k` zeros. A non-empty result proves the
/// property fails; an empty one proves nothing.
pub fn check_necessity(m: &BinaryMatrix) -> Result<Vec<usize>> {
    require_tall(m)?;
    let (n, k) = (m.n(), m.k());
    Ok((0..k).filter(|&t| n - m.column_weight(t) >= k).collect())
}

/// Ones-to-bound ratio of the full augmented matrix `2(k-1) x k` for each
/// even `k`, counted from the constructed matrix and checked against `(k+1)/k`.
pub fn ratio_trend(k_values: &[usize]) -> Result<Vec<(usize, Ratio)>> {
    k_values
        .iter()
        .map(|&k| {
            let m = build_augmented_l_banded(k, 2 * (k.max(1) - 1))?;
            let ratio = analyze(&m)?.ratio;
            assert_eq!(ratio, Ratio::new(k as u64 + 1, k as u64));
            Ok((k, ratio))
        })
        .collect()
}

/// Outcome of [`search_tight`]. Empirical only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightnessSearch {
    /// A matrix with the property and exactly `k(n-k+1)` ones, if one was found.
    pub attained: Option<BinaryMatrix>,
    /// Candidates checked with the verifier.
    pub examined: u64,
    /// True when the whole candidate space was covered.
    pub exhaustive: bool,
}

/// Searches for an `n x k` matrix with the property that attains the bound.
///
/// Such a matrix has exactly `n-k+1` ones in every column, so the candidates
/// are multisets of `k` column supports of that weight (column order does
/// not affect the property). Stops after `budget` candidates; `exhaustive`
/// is false if the budget ran out first.
pub fn search_tight(n: usize, k: usize, budget: u64) -> Result<TightnessSearch> {
    if n < k {
        return Err(Error::TooFewRows { n, k });
    }
    if k == 0 || n > 20 {
        return Err(Error::TooLarge {
            what: "n for the tightness search",
            limit: 20,
            found: n as u64,
        });
    }
    let weight = n - k + 1;
    let supports: Vec<u32> = (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == weight)
        .collect();
    // non-decreasing index tuple into `supports`
    let mut pick = alloc::vec![0usize; k];
    let mut examined = 0;
    loop {
        if examined == budget {
            return Ok(TightnessSearch {
                attained: None,
                examined,
                exhaustive: false,
            });
        }
        examined += 1;
        let m = BinaryMatrix::from_fn(n, k, |i, t| supports[pick[t]] >> i & 1 == 1)?;
        if verify_exhaustive(&m)?.holds() {
            return Ok(TightnessSearch {
                attained: Some(m),
                examined,
                exhaustive: false,
            });
        }
        let Some(pos) = (0..k).rev().find(|&p| pick[p] + 1 < supports.len()) else {
            return Ok(TightnessSearch {
                attained: None,
                examined,
                exhaustive: true,
            });
        };
        let next = pick[pos] + 1;
        for p in &mut pick[pos..] {
            *p = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitmatrix::build_l_banded;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn banded_is_optimal() {
        let r = analyze(&build_l_banded(5, 10).unwrap()).unwrap();
        assert_eq!((r.ones, r.lower_bound, r.is_optimal), (30, 30, true));
        assert_eq!(r.ratio, Ratio::new(1, 1));
        assert_eq!(r.per_row_bound, 3);
        assert!(r.row_bound_met());
        for k in (3..=21).step_by(2) {
            let r = analyze(&build_l_banded(k, 2 * k).unwrap()).unwrap();
            assert!(r.is_optimal);
            assert_eq!(r.ones, k * (k + 1));
        }
    }

    #[test]
    fn augmented_ratio() {
        let r = analyze(&build_augmented_l_banded(6, 10).unwrap()).unwrap();
        assert_eq!((r.ones, r.lower_bound), (35, 30));
        assert_eq!(r.ratio, Ratio::new(35, 30));
        assert_eq!(r.ratio.to_string(), "7/6");
        assert!(!r.is_optimal);
    }

    #[test]
    fn all_ones_ratio() {
        let r = analyze(&BinaryMatrix::ones(5, 5).unwrap()).unwrap();
        assert_eq!((r.ones, r.lower_bound), (25, 5));
        assert_eq!(r.ratio.to_string(), "5");
    }

    #[test]
    fn report_rendering() {
        let r = analyze(&build_l_banded(5, 10).unwrap()).unwrap();
        assert_eq!(
            r.to_string(),
            "ones: 30\nlower_bound: 30\nl_max: 3\nper_row_bound: 3\noptimal: true\nratio: 1\n"
        );
    }

    #[test]
    fn necessity_examples() {
        assert!(check_necessity(&build_l_banded(5, 10).unwrap())
            .unwrap()
            .is_empty());
        assert!(check_necessity(&build_augmented_l_banded(6, 10).unwrap())
            .unwrap()
            .is_empty());
        let m = (0..5).fold(BinaryMatrix::ones(5, 5).unwrap(), |m, i| {
            m.with_bit(i, 2, false)
        });
        assert_eq!(check_necessity(&m).unwrap(), vec![2]);
        assert!(!verify_exhaustive(&m).unwrap().holds());
        assert!(analyze(&BinaryMatrix::ones(2, 3).unwrap()).is_err());
        assert!(check_necessity(&BinaryMatrix::ones(2, 3).unwrap()).is_err());
    }

    #[test]
    fn trend_decreases_to_one() {
        let ks: Vec<usize> = (4..=20).step_by(2).collect();
        let trend = ratio_trend(&ks).unwrap();
        assert_eq!(trend[0].1, Ratio::new(5, 4));
        assert_eq!(trend[1].1, Ratio::new(7, 6));
        assert!(trend.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(trend.iter().all(|(_, r)| *r > Ratio::new(1, 1)));
        assert!(ratio_trend(&[5]).is_err());
        assert!(ratio_trend(&[2]).is_err());
    }

    #[test]
    fn bound_attained_on_small_shapes() {
        // empirical: the bound is attained for these shapes
        for (n, k) in [(3, 3), (4, 3), (5, 3), (6, 3), (5, 4), (6, 4), (7, 4)] {
            let s = search_tight(n, k, 1_000_000).unwrap();
            let m = s
                .attained
                .unwrap_or_else(|| panic!("no tight matrix for {n}x{k}"));
            assert!(analyze(&m).unwrap().is_optimal);
            assert!(verify_exhaustive(&m).unwrap().holds());
        }
    }

    #[test]
    fn search_budget_is_respected() {
        let s = search_tight(8, 4, 1).unwrap();
        assert!(s.examined <= 1);
    }

    #[test]
    fn bound_is_not_sufficient() {
        // first 3x3 matrix (in mask order) that clears both the ones-count
        // bound and the column test yet fails the property
        let found = (0u32..1 << 9)
            .map(|bits| BinaryMatrix::from_fn(3, 3, |i, t| bits >> (3 * i + t) & 1 == 1).unwrap())
            .find(|m| {
                analyze(m).unwrap().ones >= lower_bound(3, 3)
                    && check_necessity(m).unwrap().is_empty()
                    && !verify_exhaustive(m).unwrap().holds()
            })
            .expect("a counterexample exists");
        assert_eq!(
            found,
            BinaryMatrix::from_rows(&[[1, 1, 1], [0, 0, 0], [0, 0, 0]]).unwrap()
        );
    }
}

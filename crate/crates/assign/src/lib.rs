//! File formats, the pool simulator, and verification dispatch for
//! Walsh-code assignment matrices built on [`walsh_core`].

pub mod format;
pub mod sim;

use thiserror::Error;
use walsh_core::hall::binomial;
use walsh_core::{verify_bruteforce, verify_exhaustive, BinaryMatrix, VerificationReport};

/// `auto` uses the column scan up to this `k`.
pub const AUTO_EXHAUSTIVE_MAX_K: usize = 20;
/// Beyond that, `auto` enumerates row subsets up to this many.
pub const AUTO_BRUTEFORCE_MAX_SUBSETS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyMethod {
    Auto,
    Exhaustive,
    Bruteforce,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Core(#[from] walsh_core::Error),
    #[error(
        "too large for exact verification: exhaustive needs k <= {AUTO_EXHAUSTIVE_MAX_K} \
         (k = {k}), bruteforce needs C(n,k) <= {AUTO_BRUTEFORCE_MAX_SUBSETS} (C(n,k) = {subsets})"
    )]
    Unfit { k: usize, subsets: u64 },
}

pub fn verify(m: &BinaryMatrix, method: VerifyMethod) -> Result<VerificationReport, VerifyError> {
    Ok(match method {
        VerifyMethod::Exhaustive => verify_exhaustive(m)?,
        VerifyMethod::Bruteforce => verify_bruteforce(m)?,
        VerifyMethod::Auto => return verify_auto(m),
    })
}

/// Column scan when `k <= 20`, row-subset enumeration when `C(n,k) <= 10^6`,
/// otherwise refuses.
pub fn verify_auto(m: &BinaryMatrix) -> Result<VerificationReport, VerifyError> {
    if m.k() <= AUTO_EXHAUSTIVE_MAX_K {
        return Ok(verify_exhaustive(m)?);
    }
    let subsets = binomial(m.n(), m.k());
    if subsets <= AUTO_BRUTEFORCE_MAX_SUBSETS {
        return Ok(verify_bruteforce(m)?);
    }
    Err(VerifyError::Unfit { k: m.k(), subsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use walsh_core::hall::Method;

    #[test]
    fn auto_picks_by_size() {
        let small = walsh_core::build_l_banded(5, 10).unwrap();
        assert_eq!(verify_auto(&small).unwrap().method, Method::Exhaustive);
        let wide = BinaryMatrix::ones(23, 21).unwrap();
        assert_eq!(verify_auto(&wide).unwrap().method, Method::BruteForce);
        let huge = walsh_core::build_l_banded(25, 50).unwrap();
        assert!(matches!(
            verify_auto(&huge),
            Err(VerifyError::Unfit { k: 25, .. })
        ));
    }
}

//! Binary Walsh-code assignment matrices.
//!
//! An `n x k` binary matrix assigns codes to users: cell `(i, t)` is set when
//! code `t` may carry traffic for user `i`. The matrix has the *assignment
//! property* when any `k` users can be served at once with pairwise distinct
//! codes from their own rows.
//!
//! - [`bitmatrix`]: the matrix type, its table view, and the banded and
//!   augmented banded constructions.
//! - [`hall`]: exact verification of the property and matching-based
//!   assignment for arbitrary matrices.
//! - [`banded_assign`]: the row-shift assignment for the full banded matrix.
//! - [`bounds`]: the ones-count lower bound and optimality reports.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod banded_assign;
pub mod bitmatrix;
pub mod bounds;
pub mod error;
pub mod hall;

pub use banded_assign::{assign_with_fallback, fast_assign, label_rows, plan_clusters};
pub use bitmatrix::{
    build_augmented_l_banded, build_l_banded, from_table, to_table, AssignmentTable, BinaryMatrix,
};
pub use bounds::{analyze, check_necessity, OptimalityReport, Ratio};
pub use error::{Error, Result};
pub use hall::{
    check_diagonalized, find_assignment, verify_bruteforce, verify_exhaustive, CodeAssignment,
    HallViolation, Matching, VerificationReport,
};

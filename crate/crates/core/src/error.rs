use core::fmt;

/// Errors raised by matrix construction, conversion and the verifiers.
///
/// Indices carried inside variants are 1-based, matching how users and
/// codes are numbered in every textual output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A dimension was zero.
    EmptyDimension { n: usize, k: usize },
    /// A construction precondition on `k` or `n` was violated. The message
    /// names the exact constraint, e.g. "k must be odd".
    Construction(&'static str),
    /// A cell value other than 0 or 1.
    InvalidCell { row: usize, col: usize, value: u8 },
    /// A row of the wrong length was supplied.
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    /// A code number outside `1..=k` in an assignment table.
    CodeOutOfRange { user: usize, code: usize, k: usize },
    /// The same code listed twice for one user.
    DuplicateCode { user: usize, code: usize },
    /// The operation needs at least as many users as codes.
    TooFewRows { n: usize, k: usize },
    /// A permutation vector has the wrong length or is not a bijection.
    BadPermutation { expected: usize, found: usize },
    /// A user/row index outside `1..=n`.
    UserOutOfRange { user: usize, n: usize },
    /// The same user selected twice.
    DuplicateUser { user: usize },
    /// More users selected than there are codes.
    TooManyUsers { requested: usize, k: usize },
    /// A selection of the wrong size for an algorithm that needs exactly `expected`.
    SelectionSize { expected: usize, found: usize },
    /// A square matrix was required.
    NotSquare { n: usize, k: usize },
    /// The instance exceeds the documented ceiling of a verifier.
    TooLarge {
        what: &'static str,
        limit: u64,
        found: u64,
    },
    /// A row labeling violates the pairing rules of the banded algorithm.
    InconsistentLabels(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDimension { n, k } => {
                write!(f, "matrix dimensions must be positive (n={n}, k={k})")
            }
            Error::Construction(msg) => f.write_str(msg),
            Error::InvalidCell { row, col, value } => {
                write!(f, "cell ({row},{col}) is {value}, expected 0 or 1")
            }
            Error::RowLength {
                row,
                expected,
                found,
            } => {
                write!(f, "row {row} has {found} entries, expected {expected}")
            }
            Error::CodeOutOfRange { user, code, k } => {
                write!(f, "user {user}: code {code} outside 1..={k}")
            }
            Error::DuplicateCode { user, code } => {
                write!(f, "user {user}: code {code} listed twice")
            }
            Error::TooFewRows { n, k } => write!(f, "need n >= k, got n={n}, k={k}"),
            Error::BadPermutation { expected, found } => write!(
                f,
                "permutation of length {found} is not a bijection on {expected} elements"
            ),
            Error::UserOutOfRange { user, n } => write!(f, "user {user} outside 1..={n}"),
            Error::DuplicateUser { user } => write!(f, "user {user} selected twice"),
            Error::TooManyUsers { requested, k } => {
                write!(f, "{requested} users requested but only {k} codes exist")
            }
            Error::SelectionSize { expected, found } => {
                write!(
                    f,
                    "selection must contain exactly {expected} rows, got {found}"
                )
            }
            Error::NotSquare { n, k } => write!(f, "matrix is {n}x{k}, expected square"),
            Error::TooLarge { what, limit, found } => {
                write!(f, "{what} is {found}, above the ceiling {limit}")
            }
            Error::InconsistentLabels(msg) => write!(f, "inconsistent row labels: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

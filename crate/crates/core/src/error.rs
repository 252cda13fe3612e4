use thiserror::Error;

/// Which shape condition a function table failed.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TableViolation {
    #[error("table is empty")]
    Empty,
    #[error("f(0) must be 0")]
    NotZeroAtZero,
    #[error("not strictly increasing: f({at}) >= f({})", at + 1)]
    NotStrictlyIncreasing { at: usize },
    #[error("not convex at {at}: f({at}) + f({}) < 2 f({})", at + 2, at + 1)]
    NotConvex { at: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed partition {input:?}: {reason}")]
    MalformedPartition { input: String, reason: String },

    #[error("invalid rank function {values:?}: {reason}")]
    InvalidRankFunction { values: Vec<usize>, reason: String },

    #[error("rank function {values:?} has stable rank {stable_rank}, expected a nilpotent class")]
    NotNilpotent {
        values: Vec<usize>,
        stable_rank: usize,
    },

    #[error("size mismatch: expected n = {expected}, got n = {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid convex table: {0}")]
    InvalidTable(TableViolation),

    #[error("function table has {len} entries but size {n} needs at least {}", n + 1)]
    TableTooShort { len: usize, n: usize },

    #[error("equations need k >= {min} left-hand matrices, got {k}")]
    TooFewMatrices { k: usize, min: usize },

    #[error("equations need matrix size n >= 2, got {0}")]
    SizeTooSmall(usize),

    #[error("solution member {index} is the zero class; only nontrivial solutions are considered")]
    TrivialMember { index: usize },

    #[error("stable rank {stable_rank} of the right-hand side exceeds the matrix size {n}")]
    StableRankOverflow { stable_rank: usize, n: usize },

    #[error("enumeration needs {required} items, over the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("empty solution set")]
    EmptySolSet,

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedPartition { .. } => "MalformedPartition",
            Error::InvalidRankFunction { .. } => "InvalidRankFunction",
            Error::NotNilpotent { .. } => "NotNilpotent",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidTable(v) => match v {
                TableViolation::Empty => "EmptyTable",
                TableViolation::NotZeroAtZero => "NotZeroAtZero",
                TableViolation::NotStrictlyIncreasing { .. } => "NotStrictlyIncreasing",
                TableViolation::NotConvex { .. } => "NotConvex",
            },
            Error::TableTooShort { .. } => "TableTooShort",
            Error::TooFewMatrices { .. } => "TooFewMatrices",
            Error::SizeTooSmall(_) => "SizeTooSmall",
            Error::TrivialMember { .. } => "TrivialMember",
            Error::StableRankOverflow { .. } => "StableRankOverflow",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::EmptySolSet => "EmptySolSet",
            Error::MalformedRational(_) => "MalformedRational",
            Error::NotSquare { .. } => "NotSquare",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

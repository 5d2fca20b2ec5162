use core::fmt;

/// Errors raised by the algorithmic core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A pair labeling violates transitivity and describes no partition.
    InconsistentLabeling { a: usize, b: usize, c: usize },
    /// Cluster list does not describe a partition of `0..n`.
    InvalidPartition(&'static str),
    /// Two inputs disagree on their element count or length.
    SizeMismatch { expected: usize, found: usize },
    NonFinite(f64),
    OutOfRange(f64),
    /// Cross scores do not cover every (row, column) pair.
    IncompleteCross { rows: usize, cols: usize, len: usize },
    /// Exact enumeration refused: `n` exceeds the configured limit.
    TooLarge { n: usize, limit: usize },
    EmptyInstance,
    DimensionMismatch { expected: usize, found: usize },
    EmptyBatch,
    /// Not enough join or cut pairs to fill a balanced batch.
    InsufficientPairs { joins: usize, cuts: usize, needed: usize },
    EmptySpec,
    UnmappedClass(usize),
    Unassigned(usize),
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InconsistentLabeling { a, b, c } => write!(
                f,
                "inconsistent labeling: {a}~{b} and {b}~{c} are joined but {a},{c} is cut"
            ),
            Error::InvalidPartition(why) => write!(f, "invalid partition: {why}"),
            Error::SizeMismatch { expected, found } => {
                write!(f, "size mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(v) => write!(f, "non-finite value {v}"),
            Error::OutOfRange(v) => write!(f, "value {v} out of range"),
            Error::IncompleteCross { rows, cols, len } => write!(
                f,
                "cross scores incomplete: {rows}x{cols} requires {} values, got {len}",
                rows * cols
            ),
            Error::TooLarge { n, limit } => {
                write!(f, "instance with {n} elements exceeds exact limit {limit}")
            }
            Error::EmptyInstance => f.write_str("empty instance"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyBatch => f.write_str("empty batch"),
            Error::InsufficientPairs { joins, cuts, needed } => write!(
                f,
                "balanced batches need {needed} joins and {needed} cuts, dataset has {joins} joins and {cuts} cuts"
            ),
            Error::EmptySpec => f.write_str("empty cluster size specification"),
            Error::UnmappedClass(c) => write!(f, "class {c} has no group mapping"),
            Error::Unassigned(e) => write!(f, "element {e} has no assigned class"),
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;

//! Error type shared by every module in the crate.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the core algorithms.
///
/// Variants carry enough structure for callers to map them onto process
/// exit codes or user-facing messages without string matching.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Two items resolved to the same identifier.
    DuplicateId { id: String },
    /// An input that must be nonempty was empty.
    Empty { what: &'static str },
    /// Row width or vector length did not match what the operation expects.
    DimensionMismatch { expected: usize, actual: usize },
    /// A value that must be finite was NaN or infinite.
    NonFinite { what: &'static str },
    /// A parameter failed validation; `reason` explains the accepted range.
    InvalidParam { name: &'static str, reason: String },
    /// A draw or partition asked for more items than the pool holds.
    Insufficient {
        what: String,
        needed: usize,
        available: usize,
    },
    /// All pairwise distances were zero, so no bandwidth can be inferred.
    DegenerateDistances,
    /// A kernel matrix would exceed the in-memory materialization cap.
    GramTooLarge {
        side: &'static str,
        n: usize,
        max: usize,
    },
    /// A prediction referenced an image absent from the ground truth.
    UnknownImage { id: String },
    /// One side of a two-sample comparison carried no labels.
    EmptySide { side: &'static str },
    /// Two reports being compared do not describe the same target dataset.
    TargetMismatch { before: String, after: String },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DuplicateId { id } => write!(f, "duplicate id: {id:?}"),
            CoreError::Empty { what } => write!(f, "{what} must not be empty"),
            CoreError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            CoreError::NonFinite { what } => write!(f, "{what} must be finite"),
            CoreError::InvalidParam { name, reason } => {
                write!(f, "invalid parameter {name}: {reason}")
            }
            CoreError::Insufficient {
                what,
                needed,
                available,
            } => write!(
                f,
                "insufficient {what}: need {needed}, have {available} (deficit {})",
                needed - available
            ),
            CoreError::DegenerateDistances => write!(
                f,
                "all pairwise distances are zero; pass an explicit bandwidth instead of the median heuristic"
            ),
            CoreError::GramTooLarge { side, n, max } => write!(
                f,
                "{side} sample has {n} rows, above the {max}-row kernel materialization cap; subsample first"
            ),
            CoreError::UnknownImage { id } => {
                write!(f, "prediction references unknown image {id:?}")
            }
            CoreError::EmptySide { side } => {
                write!(f, "{side} manifest carries no labels")
            }
            CoreError::TargetMismatch { before, after } => write!(
                f,
                "reports describe different targets: {before:?} vs {after:?}"
            ),
        }
    }
}

impl core::error::Error for CoreError {}

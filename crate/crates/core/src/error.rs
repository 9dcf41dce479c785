//! Error type shared by every module.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or querying a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a space must have at least one outcome")]
    ZeroSize,

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("objects do not share a common domain")]
    DomainMismatch,

    #[error("product space would have {size} points, above the cap of {cap}")]
    ProductTooLarge { size: usize, cap: usize },

    #[error("index set must be nonempty")]
    EmptyIndexSet,

    #[error("index sets must be disjoint to be joined")]
    OverlappingIndexSets,

    #[error("coordinate mismatch: {0}")]
    CoordinateMismatch(String),

    #[error("index {0} is not part of the density's index set")]
    IndexNotSubset(usize),

    #[error("index sets overlap at {0}")]
    IndexOverlap(usize),

    #[error("per-index data does not line up with the index set")]
    IndexMismatch,

    #[error("blocks do not partition the index set")]
    BadPartition,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("map is not measurable or not total: {0}")]
    InvalidObject(String),

    #[error("event member {member} out of range for space of size {size}")]
    EventOutOfRange { member: usize, size: usize },

    #[error("law is not absolutely continuous: point {point:?} has positive probability {mass} but zero base weight")]
    NotAbsolutelyContinuous { point: Vec<usize>, mass: String },

    #[error("no solution at exogenous point {point} {tuple:?}")]
    NoSolution { point: usize, tuple: Vec<usize> },

    #[error("non-unique solution at exogenous point {point} {tuple:?}")]
    NonUniqueSolution { point: usize, tuple: Vec<usize> },

    #[error("unknown endogenous index {0}")]
    UnknownIndex(usize),

    #[error("value {value} out of range for coordinate of size {size}")]
    BadValue { value: usize, size: usize },

    #[error("chain must cover each target index exactly once")]
    ChainMismatch,

    #[error("nested and direct evaluations disagree; this is an internal invariant violation")]
    DecompositionMismatch,

    #[error("not factorizable: joint density differs from the product at point {point:?}")]
    NotFactorizable { point: Vec<usize> },

    #[error("cannot parse rational {0:?}; expected \"p/q\" or an integer string")]
    BadRational(String),

    #[error("slopes must be non-decreasing for a convex piecewise-linear function")]
    NotConvex,

    #[error("unresolved reference {kind} {id:?}")]
    UnresolvedReference { kind: &'static str, id: String },

    #[error("model file: {0}")]
    BadModel(String),
}

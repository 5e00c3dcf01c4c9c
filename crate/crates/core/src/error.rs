//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by group arithmetic, function evaluation, scans and fits.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoreError {
    /// An element does not belong to the group it was used with.
    #[error("element mismatch: {0}")]
    ElementMismatch(String),
    /// Integer arithmetic left the 64-bit range.
    #[error("integer overflow: {0}")]
    Overflow(String),
    /// A Cayley table failed the associativity check.
    #[error("table is not associative at indices ({x}, {y}, {z})")]
    NotAssociative { x: usize, y: usize, z: usize },
    /// A Cayley table has no two-sided identity.
    #[error("table has no identity element")]
    NoIdentity,
    /// A Cayley table row or column is not a permutation.
    #[error("table row or column {index} is not a permutation")]
    NonInvertible { index: usize },
    /// A table is malformed (not square, entry out of range, empty).
    #[error("bad table: {0}")]
    BadTable(String),
    /// A radius schedule violated its preconditions.
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    /// A descriptor leaf is incompatible with the group it runs on.
    #[error("descriptor/group mismatch: {0}")]
    DescriptorMismatch(String),
    /// An exponential-character evaluation would leave the f64 range.
    #[error("exp-character overflow: |Re(mu.x)| = {magnitude} exceeds 700")]
    ExpOverflow { magnitude: f64 },
    /// Attempt to invert the zero multiplicative function.
    #[error("cannot invert the zero multiplicative function")]
    ZeroCharacter,
    /// Operation requires a lattice group.
    #[error("operation requires a lattice group")]
    NotLattice,
    /// Operation requires a finite group.
    #[error("operation requires a finite group")]
    NotFinite,
    /// Finite-group enumeration limit exceeded.
    #[error("group order {order} exceeds the enumeration limit {limit}")]
    TooLarge { order: usize, limit: usize },
    /// A Hyers projection was asked for a function with unbounded Cauchy defect.
    #[error("unbounded Cauchy defect: {0}")]
    UnboundedCauchyDefect(String),
    /// A boundedness verdict inside a dependence fit came back Inconclusive.
    #[error("inconclusive dependence verdict at stage: {0}")]
    InconclusiveDependence(String),
    /// Family construction parameters violate a case invariant.
    #[error("invalid parameters for case {case}: {clause}")]
    InvalidParams { case: u8, clause: String },
    /// The Gram matrix of a least-squares fit is numerically singular.
    #[error("degenerate Gram matrix (normalized determinant {det:.3e})")]
    DegenerateGram { det: f64 },
    /// Malformed JSON input.
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

//! Exact solver for truncated moment problems on finite ground sets.
//!
//! A problem instance is a finite set of labeled points, a linearly
//! independent system of functions given by its exact evaluation matrix,
//! and a linear functional given by its coordinates in the dual basis.
//! On top of that the crate decides whether the functional is a
//! nonnegative combination of point evaluations (i.e. has a representing
//! measure), computes the core variety driving that decision, extracts and
//! compresses finitely atomic measures, classifies functionals within the
//! facial structure of the moment cone, and answers positive-extension and
//! truncation-tower questions.
//!
//! All arithmetic is exact rational arithmetic; every certificate returned
//! by the library re-verifies by direct substitution.

pub mod corevar;
pub mod exact;
pub mod extend;
pub mod faces;
pub mod io;
pub mod measure;
pub mod space;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("basis rows are linearly dependent (rank {rank} < {rows})")]
    DependentBasis { rank: usize, rows: usize },
    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error("point `{0}` is not in the core variety")]
    NotInCoreVariety(String),
    #[error("the functional has no representing measure")]
    NoRepresentingMeasure,
    #[error("internal invariant violated: {0}")]
    InternalInfeasible(String),
    #[error("invalid nesting: {0}")]
    InvalidNesting(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

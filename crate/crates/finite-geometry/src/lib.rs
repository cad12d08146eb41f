//! Finite projective and affine geometries over prime fields.
//!
//! [`Space`] materializes PG(n,q) or AG(n,q) with dense point and line ids,
//! a precomputed pairwise line-meet table, and a family of coordinate-based
//! oracles (concurrency, coplanarity, triple classification, span dimension).
//! These oracles are the semantic ground truth that the intersection-only
//! predicate evaluators elsewhere in the workspace are verified against.
//!
//! Ids are canonical: points are ranked lexicographically by their
//! (normalized) coordinate vectors, lines by their sorted point-id sets, so
//! the same `(kind, n, q)` always yields the same numbering.
//!
//! Every semantic accessor bumps an internal read counter; verification
//! harnesses use it to certify that a given evaluation phase never touched
//! coordinate data (see [`Space::semantic_reads`]).

mod field;
mod oracles;
mod space;

pub use field::Gf;
pub use oracles::TripleClass;
pub use space::{
    Kind, Line, MeetResult, Point, PointId, Space, SpaceParams, DEFAULT_LINE_CAP,
};

/// Dense line index, valid within one [`Space`].
pub type LineId = u16;

/// Errors for space construction and oracle queries.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("field order {0} is not a prime in the supported range 2..=13")]
    NonPrimeField(u32),
    #[error("dimension {0} is below the minimum of 3")]
    DimensionTooSmall(u32),
    #[error("model has {lines} lines, above the configured cap of {cap}")]
    ModelTooLarge { lines: u64, cap: u64 },
    #[error("line id {0} out of range")]
    InvalidId(usize),
    #[error("triple does not have the class required by this query")]
    WrongClass,
    #[error("empty line list")]
    EmptyList,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

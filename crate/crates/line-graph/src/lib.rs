//! The line-intersection graph of a finite geometry, exposed as the sole
//! structure that defined-predicate evaluators may read.
//!
//! [`IntersectionModel`] keeps the line universe and the symmetric,
//! irreflexive intersection relation as per-line bitsets — no coordinates,
//! no incidence lists. Downstream predicate evaluators depend only on this
//! crate, which makes "defined in terms of line intersection" a structural
//! guarantee rather than a convention, and an internal read counter lets
//! harnesses certify it dynamically as well.
//!
//! [`PredicateTable`] holds the memoized low-level relation tables
//! (co-punctuality triples, pencils, meet-point distinction) plus tri-state
//! caches for the triple-classification layer; [`EvalBudget`] carries the
//! quantifier-search budget and evaluation mode shared by all evaluators.

mod bitset;
mod budget;
mod model;
mod tables;

pub use bitset::LineSet;
pub use budget::{EvalBudget, Mode, Tri};
pub use model::{GraphIoError, IntersectionModel, ModelKind, ModelParams};
pub use tables::{key3, key_pairs, key_triples_ordered, key_triples_sym};
pub use tables::{BitCube, Memo, PredicateTable};

/// Dense line index, valid within one [`IntersectionModel`].
pub type LineId = u16;

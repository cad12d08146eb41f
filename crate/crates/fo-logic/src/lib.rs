//! Positive first-order formulas over the line-intersection relation:
//! AST, parser, positivity linter, reference evaluator, and the shipped
//! definition corpus.
//!
//! The point of this crate is independence. The hand-coded predicate
//! evaluators earn their speed through structural shortcuts; the evaluator
//! here does none of that — it walks the formula text with exhaustive
//! quantifier loops over the model's line set, so agreement between the two
//! is evidence, not bookkeeping. The grammar has no negation operator at
//! all: positivity is enforced first by the parser (a `!` cannot be
//! written) and then by a transitive linter for the equality atoms that
//! individual definitions must declare.
//!
//! Pipeline: a corpus file's directives are read ([`prep::read_directives`]),
//! its integer-parameter macros expanded ([`prep::expand`]), the result
//! parsed ([`parse_definition`]) and linted ([`check_positive`]), and the
//! surviving definitions compiled into a [`FoSession`] for evaluation
//! against an [`line_graph::IntersectionModel`].

pub mod ast;
pub mod corpus;
pub mod eval;
pub mod lint;
pub mod parse;
pub mod prep;

pub use ast::{Definition, Formula};
pub use corpus::{load_corpus, Corpus, CorpusEntry, CORPUS_SOURCES};
pub use eval::{eval, EvalOutcome, FoSession};
pub use lint::{check_positive, PositivityFlags, Violation};
pub use parse::parse_definition;

/// Everything that can go wrong between a corpus file and an answer.
#[derive(Debug, thiserror::Error)]
pub enum FoError {
    #[error("parse error at line {line}, column {col}: found {found}, expected {}", expected.join(" or "))]
    Parse {
        line: u32,
        col: u32,
        found: String,
        expected: Vec<String>,
    },
    #[error("unbound variable `{var}` at line {line}, column {col}")]
    Unbound { var: String, line: u32, col: u32 },
    #[error("reference to undefined predicate `{name}`")]
    UnresolvedPredRef { name: String },
    #[error("`{name}` takes {want} argument(s), got {got}")]
    Arity { name: String, want: usize, got: usize },
    #[error("bad directive: {0}")]
    Directive(String),
    #[error("duplicate definition `{0}`")]
    Duplicate(String),
    #[error("corpus file {file} violates its declared flags: {detail}")]
    CorpusFlags { file: String, detail: String },
    #[error("no assignment for free variable `{0}`")]
    MissingAssignment(String),
}

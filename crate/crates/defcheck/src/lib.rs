//! Verification harness for the line-intersection predicate suite.
//!
//! The library side hosts the pieces the `defcheck` binary is built from:
//!
//! * [`spacespec`] — `pg:<n>:<q>` / `ag:<n>:<q>` space descriptions;
//! * [`dispatch`] — the table tying each defined predicate to its
//!   dimension guard, evaluator call, and coordinate oracle;
//! * [`verify`] — the sweep engine comparing definitions against oracles
//!   over exhaustive, symmetry-reduced, sampled, or orbit-representative
//!   tuple domains, with JSON reports;
//! * [`corpus_check`] — agreement of the formula corpus with the
//!   hand-coded evaluators, plus the positivity lint;
//! * [`clique`] — exact maximum-clique search on the intersection graph;
//! * [`auto`] — exact automorphism-group order of small models.
//!
//! Sweeps parallelise across a rayon pool; set `DEFCHECK_WORKERS` to pin
//! the worker count.

pub mod auto;
pub mod clique;
pub mod corpus_check;
pub mod dispatch;
pub mod spacespec;
pub mod verify;

pub use spacespec::SpaceSpec;

/// Environment variable naming the sweep worker count.
pub const WORKERS_VAR: &str = "DEFCHECK_WORKERS";

/// Size the global rayon pool from `DEFCHECK_WORKERS` if it is set.
/// Harmless to call more than once; later calls keep the first pool.
pub fn configure_workers() {
    if let Some(count) = std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(count).build_global();
    }
}

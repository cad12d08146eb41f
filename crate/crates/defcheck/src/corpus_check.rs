//! Cross-checking the formula corpus against the hand-coded evaluators.
//!
//! Every corpus definition admitted by its dimension guard is evaluated
//! through the generic formula interpreter and through the corresponding
//! hand-coded predicate, and the two must agree on every argument tuple:
//! exhaustively up to arity three, on a seeded sample above that. The
//! check also runs the positivity lint over every definition under its
//! declared flags.

use crate::dispatch;
use anyhow::{anyhow, bail, Context};
use defined_predicates::Eval;
use finite_geometry::Space;
use line_graph::{EvalBudget, IntersectionModel, LineId, PredicateTable, Tri};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Arity at and below which the agreement sweep is exhaustive.
const EXHAUSTIVE_ARITY: usize = 3;
/// Default sample size for higher arities.
pub const DEFAULT_SAMPLE: u64 = 10_000;
const WITNESS_CAP: usize = 8;

#[derive(Debug, Serialize)]
pub struct NameCheck {
    pub name: String,
    pub arity: usize,
    pub scope: String,
    pub checked: u64,
    pub disagree: u64,
    pub witnesses: Vec<Vec<LineId>>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Serialize)]
pub struct CorpusReport {
    pub space: String,
    pub lint_violations: u64,
    pub skipped: Vec<(String, String)>,
    pub checks: Vec<NameCheck>,
    pub seed: u64,
    pub elapsed_ms: u64,
}

impl CorpusReport {
    pub fn clean(&self) -> bool {
        self.lint_violations == 0 && self.checks.iter().all(|c| c.disagree == 0)
    }
}

/// Run the corpus agreement check over one space.
pub fn check_corpus(
    space: &Space,
    model: &IntersectionModel,
    tables: &PredicateTable,
    sample: u64,
    seed: u64,
) -> anyhow::Result<CorpusReport> {
    let started = Instant::now();
    let p = model.params();
    let corpus = fo_logic::load_corpus(p.kind, p.n, p.q)
        .map_err(|e| anyhow!("corpus load failed: {e}"))?;

    // Positivity lint, each definition under its own declared flags.
    let all_defs = corpus.definitions();
    let mut lint_violations = 0u64;
    for entry in &corpus.entries {
        lint_violations += fo_logic::check_positive(&entry.def, &all_defs, entry.flags).len() as u64;
    }

    let session = corpus
        .session(model)
        .map_err(|e| anyhow!("session build failed: {e}"))?;
    let hand = Eval::new(model, tables, EvalBudget::blind());
    let lines = space.line_count() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut checks = Vec::new();
    for entry in &corpus.entries {
        let clock = Instant::now();
        let dispatch = dispatch::entry(&entry.name).with_context(|| {
            format!("corpus defines `{}` but no evaluator claims that name", entry.name)
        })?;
        let arity = entry.def.params.len();
        if arity != dispatch.arity {
            bail!(
                "`{}` has arity {} in the corpus but {} in the evaluator",
                entry.name,
                arity,
                dispatch.arity
            );
        }
        let (tuples, scope) = if arity <= EXHAUSTIVE_ARITY {
            (exhaustive_tuples(lines, arity), "exhaustive".to_string())
        } else {
            let ix = Uniform::from(0..lines);
            let tuples = (0..sample)
                .map(|_| (0..arity).map(|_| ix.sample(&mut rng) as LineId).collect())
                .collect();
            (tuples, format!("sampled:{sample}"))
        };
        let disagreements: Vec<Vec<LineId>> = tuples
            .par_iter()
            .map(|t: &Vec<LineId>| {
                let formula = session
                    .eval_def(&entry.name, t, u64::MAX)
                    .map_err(|e| anyhow!("formula eval of `{}` failed: {e}", entry.name))?
                    .value;
                let coded = (dispatch.eval)(&hand, t)?.value;
                debug_assert_ne!(formula, Tri::Unknown, "unlimited budget cannot run out");
                Ok(if formula == coded { None } else { Some(t.clone()) })
            })
            .collect::<anyhow::Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        checks.push(NameCheck {
            name: entry.name.clone(),
            arity,
            scope,
            checked: tuples.len() as u64,
            disagree: disagreements.len() as u64,
            witnesses: disagreements.into_iter().take(WITNESS_CAP).collect(),
            elapsed_ms: clock.elapsed().as_millis() as u64,
        });
    }

    Ok(CorpusReport {
        space: {
            let sp = space.params();
            format!("{}:{}:{}", sp.kind.tag(), sp.n, sp.q)
        },
        lint_violations,
        skipped: corpus
            .skipped
            .iter()
            .map(|(file, why)| (file.to_string(), why.clone()))
            .collect(),
        checks,
        seed,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

fn exhaustive_tuples(lines: u64, arity: usize) -> Vec<Vec<LineId>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    let total = lines.pow(arity as u32) as usize;
    let mut out = Vec::with_capacity(total);
    let mut t = vec![0 as LineId; arity];
    loop {
        out.push(t.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if (t[i] as u64) < lines {
                break;
            }
            t[i] = 0;
        }
    }
}

/// The negative control for the positivity discipline: a definition with
/// a negated intersection atom must be rejected outright (the grammar has
/// no negation connective), and an inequality atom must be flagged when
/// the declared flags do not allow one.
pub fn rejects_negated_intersection() -> bool {
    let negated_sim = fo_logic::parse_definition("bad(a, b) := !sim(a, b)").is_err();
    let smuggled = fo_logic::parse_definition("bad(a, b) := neq(a, b)")
        .map(|def| {
            !fo_logic::check_positive(&def, &[], fo_logic::PositivityFlags::strict()).is_empty()
        })
        .unwrap_or(false);
    negated_sim && smuggled
}

//! The sweep engine. A sweep materialises a tuple domain, evaluates the
//! coordinate oracle over it, resets the coordinate-access counter, runs
//! the model-only definition in parallel, and reports agreement counts
//! with disagreement witnesses.
//!
//! Phase order matters: every coordinate read happens before the counter
//! reset, so the `semantic_reads` figure in the report measures the
//! definition evaluation alone and a blind sweep can prove it never
//! touched coordinates.

use crate::dispatch::{Entry, Filter};
use anyhow::{bail, Context};
use defined_predicates::{Eval, WitnessProvider};
use finite_geometry::{MeetResult, Space};
use line_graph::{EvalBudget, IntersectionModel, LineId, Mode, PredicateTable, Tri};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Largest domain a sweep will materialise eagerly.
const DOMAIN_CAP: u64 = 20_000_000;
/// Disagreement witnesses kept in a report.
const WITNESS_CAP: usize = 16;
/// Sampled cross-check size attached to an orbit-representative sweep.
const ORBIT_CROSS_CHECK: u64 = 1_000;

/// How the tuple domain is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScopeMode {
    /// Every tuple in the filtered domain.
    Exhaustive,
    /// Order-free tuples only (strictly increasing components, or one of
    /// each unordered pair for the six-argument predicates); sound when
    /// the predicate is invariant under the dropped permutations.
    SymReduced,
    /// Seeded uniform draws from the filtered domain.
    Sampled { count: u64 },
    /// One representative per intersection class of an argument pair,
    /// plus a seeded cross-check sample.
    OrbitReps,
}

impl ScopeMode {
    pub fn label(&self) -> String {
        match self {
            ScopeMode::Exhaustive => "exhaustive".into(),
            ScopeMode::SymReduced => "sym-reduced".into(),
            ScopeMode::Sampled { count } => format!("sampled:{count}"),
            ScopeMode::OrbitReps => "orbit-reps".into(),
        }
    }

    /// Parse `exhaustive`, `sym-reduced`, `sampled[:COUNT]`, `orbit-reps`.
    pub fn parse(text: &str) -> anyhow::Result<ScopeMode> {
        Ok(match text {
            "exhaustive" => ScopeMode::Exhaustive,
            "sym-reduced" => ScopeMode::SymReduced,
            "orbit-reps" => ScopeMode::OrbitReps,
            "sampled" => ScopeMode::Sampled { count: 100_000 },
            _ => match text.strip_prefix("sampled:") {
                Some(count) => ScopeMode::Sampled {
                    count: count
                        .parse()
                        .with_context(|| format!("bad sample count `{count}`"))?,
                },
                None => bail!("unknown scope `{text}`"),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Counts {
    pub checked: u64,
    pub agree: u64,
    pub disagree: u64,
    pub unknown: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub args: Vec<LineId>,
    pub defined: &'static str,
    pub oracle: bool,
    /// Bindings of the outermost existential block, when the evaluation
    /// produced any.
    pub transcript: Vec<(&'static str, LineId)>,
}

/// Result of one sweep. Serialises with this key order.
#[derive(Debug, Serialize)]
pub struct Report {
    pub space: String,
    pub predicate: String,
    pub oracle: String,
    pub scope: String,
    pub mode: String,
    pub counts: Counts,
    pub witnesses: Vec<Witness>,
    pub orbits: Option<Vec<String>>,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub nodes: u64,
    pub semantic_reads: u64,
    /// Longest witness chain a guided provider built, if one was used.
    pub max_chain: Option<usize>,
}

impl Report {
    /// `0` on full agreement, `1` on any disagreement, `3` on unknowns
    /// when they are not allowed.
    pub fn exit_code(&self, allow_unknown: bool) -> i32 {
        if self.counts.disagree > 0 {
            1
        } else if self.counts.unknown > 0 && !allow_unknown {
            3
        } else {
            0
        }
    }
}

fn mode_label(mode: Mode) -> &'static str {
    match mode {
        Mode::Blind => "blind",
        Mode::Guided => "guided",
        Mode::GuidedThenBlind => "guided-then-blind",
    }
}

fn tri_label(t: Tri) -> &'static str {
    match t {
        Tri::True => "True",
        Tri::False => "False",
        Tri::Unknown => "Unknown",
    }
}

fn space_tag(space: &Space) -> String {
    let p = space.params();
    format!("{}:{}:{}", p.kind.tag(), p.n, p.q)
}

/// All ordered tuples of the given arity, in lexicographic order.
fn ordered_tuples(lines: u64, arity: usize) -> anyhow::Result<Vec<Vec<LineId>>> {
    let total = (lines as u64).checked_pow(arity as u32).filter(|&t| t <= DOMAIN_CAP);
    let Some(total) = total else {
        bail!("domain of {lines}^{arity} tuples is too large; use a sampled scope");
    };
    let mut out = Vec::with_capacity(total as usize);
    let mut t = vec![0 as LineId; arity.max(1)];
    if arity == 0 {
        return Ok(vec![Vec::new()]);
    }
    loop {
        out.push(t.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return Ok(out);
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

/// Strictly increasing tuples of the given arity.
fn increasing_tuples(lines: u64, arity: usize) -> Vec<Vec<LineId>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut t: Vec<LineId> = (0..arity as LineId).collect();
    if (arity as u64) > lines {
        return out;
    }
    loop {
        out.push(t.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if (t[i] as u64) < lines - (arity - 1 - i) as u64 {
                for j in i + 1..arity {
                    t[j] = t[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Ordered pairs in a given intersection class.
fn pairs_in_class(space: &Space, want: fn(MeetResult) -> bool) -> Vec<Vec<LineId>> {
    let n = space.line_count() as LineId;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && want(space.meet(a, b)) {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// The base list a pair filter draws from.
fn filtered_pairs(space: &Space, filter: Filter) -> Vec<Vec<LineId>> {
    match filter {
        Filter::MeetingPairs => pairs_in_class(space, |m| m.is_point()),
        Filter::SkewPairs => pairs_in_class(space, |m| m == MeetResult::Skew),
        Filter::DisjointPairs => {
            pairs_in_class(space, |m| matches!(m, MeetResult::Skew | MeetResult::Parallel))
        }
        _ => unreachable!("not a pair filter"),
    }
}

/// All ordered carrier triples (triangles and concurrent non-coplanar
/// triples), in lexicographic order.
fn carrier_triples(space: &Space) -> Vec<Vec<LineId>> {
    let n = space.line_count() as LineId;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let t = [a, b, c];
                if Filter::CarrierPairs.accepts(space, &[a, b, c, a, b, c]) {
                    out.push(t.to_vec());
                }
            }
        }
    }
    out
}

fn glue(left: &[LineId], right: &[LineId]) -> Vec<LineId> {
    left.iter().chain(right.iter()).copied().collect()
}

/// Materialise the tuple domain for a scope/filter combination. The
/// second component lists the orbit labels covered, for orbit scopes.
fn domain(
    space: &Space,
    entry: &Entry,
    scope: ScopeMode,
    seed: u64,
) -> anyhow::Result<(Vec<Vec<LineId>>, Option<Vec<String>>)> {
    let lines = space.line_count() as u64;
    let arity = entry.arity;
    if arity == 0 {
        return Ok((vec![Vec::new()], None));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if entry.filter == Filter::CarrierPairs {
        let triples = carrier_triples(space);
        let tuples = match scope {
            ScopeMode::Exhaustive | ScopeMode::SymReduced => {
                let total = (triples.len() as u64).pow(2);
                if total > DOMAIN_CAP {
                    bail!("{total} carrier-triple pairs exceed the eager cap; use a sampled scope");
                }
                let mut out = Vec::with_capacity(total as usize);
                for (i, t1) in triples.iter().enumerate() {
                    let start = if scope == ScopeMode::SymReduced { i } else { 0 };
                    for t2 in &triples[start..] {
                        out.push(glue(t1, t2));
                    }
                }
                out
            }
            ScopeMode::Sampled { count } => {
                let ix = Uniform::from(0..triples.len());
                (0..count)
                    .map(|_| glue(&triples[ix.sample(&mut rng)], &triples[ix.sample(&mut rng)]))
                    .collect()
            }
            ScopeMode::OrbitReps => {
                bail!("orbit scope is only defined for binary predicates")
            }
        };
        return Ok((tuples, None));
    }

    match scope {
        ScopeMode::Exhaustive => {
            let mut tuples = ordered_tuples(lines, arity)?;
            if entry.filter != Filter::All {
                tuples.retain(|t| entry.filter.accepts(space, t));
            }
            Ok((tuples, None))
        }
        ScopeMode::SymReduced => {
            let mut tuples = increasing_tuples(lines, arity);
            if entry.filter != Filter::All {
                tuples.retain(|t| entry.filter.accepts(space, t));
            }
            Ok((tuples, None))
        }
        ScopeMode::Sampled { count } => {
            let tuples = match entry.filter {
                Filter::All => {
                    let ix = Uniform::from(0..lines);
                    (0..count)
                        .map(|_| (0..arity).map(|_| ix.sample(&mut rng) as LineId).collect())
                        .collect()
                }
                _ => {
                    let base = filtered_pairs(space, entry.filter);
                    if base.is_empty() {
                        bail!("the space has no pairs in the requested class");
                    }
                    let ix = Uniform::from(0..base.len());
                    (0..count).map(|_| base[ix.sample(&mut rng)].clone()).collect()
                }
            };
            Ok((tuples, None))
        }
        ScopeMode::OrbitReps => {
            if arity != 2 {
                bail!("orbit scope is only defined for binary predicates");
            }
            let n = lines as LineId;
            let mut reps: Vec<(String, Vec<LineId>)> = vec![("equal".into(), vec![0, 0])];
            let mut seen_meet = false;
            let mut seen_skew = false;
            let mut seen_par = false;
            'scan: for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    match space.meet(a, b) {
                        MeetResult::Point(_) if !seen_meet => {
                            seen_meet = true;
                            reps.push(("meeting".into(), vec![a, b]));
                        }
                        MeetResult::Skew if !seen_skew => {
                            seen_skew = true;
                            reps.push(("skew".into(), vec![a, b]));
                        }
                        MeetResult::Parallel if !seen_par => {
                            seen_par = true;
                            reps.push(("parallel".into(), vec![a, b]));
                        }
                        _ => {}
                    }
                    if seen_meet && seen_skew && seen_par {
                        break 'scan;
                    }
                }
            }
            let orbits: Vec<String> = reps.iter().map(|(name, _)| name.clone()).collect();
            let mut tuples: Vec<Vec<LineId>> = reps.into_iter().map(|(_, t)| t).collect();
            let ix = Uniform::from(0..lines);
            for _ in 0..ORBIT_CROSS_CHECK {
                tuples.push(vec![ix.sample(&mut rng) as LineId, ix.sample(&mut rng) as LineId]);
            }
            Ok((tuples, Some(orbits)))
        }
    }
}

/// Run one sweep of `entry` over `space`.
///
/// `provider` supplies witnesses when the budget mode is guided; pass
/// `None` for blind sweeps. The same seed, scope, and budget always
/// produce the same report.
pub fn sweep(
    space: &Space,
    model: &IntersectionModel,
    tables: &PredicateTable,
    entry: &Entry,
    scope: ScopeMode,
    budget: EvalBudget,
    provider: Option<&dyn WitnessProvider>,
) -> anyhow::Result<Report> {
    if !(entry.admits)(&model.params()) {
        bail!(
            "`{}` is not defined on {} (wrong kind or dimension)",
            entry.name,
            space_tag(space)
        );
    }
    if budget.mode != Mode::Blind && provider.is_none() {
        bail!("a guided sweep needs a witness provider");
    }
    let started = Instant::now();

    // Coordinate phase: the domain and the oracle bits.
    let (tuples, orbits) = domain(space, entry, scope, budget.seed)?;
    let oracle_bits: Vec<bool> = tuples.iter().map(|t| (entry.oracle)(space, t)).collect();

    // Model-only phase.
    space.reset_semantic_reads();
    let eval = match provider {
        Some(p) if budget.mode != Mode::Blind => Eval::with_provider(model, tables, budget, p),
        _ => Eval::new(model, tables, budget),
    };
    let outcomes: Vec<(Tri, u64)> = tuples
        .par_iter()
        .map(|t| (entry.eval)(&eval, t).map(|r| (r.value, r.nodes_used)))
        .collect::<Result<_, _>>()?;
    let semantic_reads = space.semantic_reads();

    let mut counts = Counts { checked: tuples.len() as u64, agree: 0, disagree: 0, unknown: 0 };
    let mut witnesses = Vec::new();
    let mut nodes: u64 = 0;
    for ((tuple, &oracle), &(value, used)) in
        tuples.iter().zip(&oracle_bits).zip(&outcomes)
    {
        nodes = nodes.saturating_add(used);
        match value {
            Tri::Unknown => counts.unknown += 1,
            v if v.is_true() == oracle => counts.agree += 1,
            v => {
                counts.disagree += 1;
                if witnesses.len() < WITNESS_CAP {
                    // Re-run once to harvest the existential transcript;
                    // the sweep itself keeps only values to stay lean.
                    let transcript = (entry.eval)(&eval, tuple)
                        .ok()
                        .and_then(|r| r.witnesses)
                        .unwrap_or_default();
                    witnesses.push(Witness {
                        args: tuple.clone(),
                        defined: tri_label(v),
                        oracle,
                        transcript,
                    });
                }
            }
        }
    }

    Ok(Report {
        space: space_tag(space),
        predicate: entry.name.to_string(),
        oracle: entry.oracle_name.to_string(),
        scope: scope.label(),
        mode: mode_label(budget.mode).to_string(),
        counts,
        witnesses,
        orbits,
        seed: budget.seed,
        elapsed_ms: started.elapsed().as_millis() as u64,
        nodes,
        semantic_reads,
        max_chain: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::entry;
    use finite_geometry::Kind;
    use std::sync::OnceLock;

    fn pg32() -> (&'static Space, &'static IntersectionModel, &'static PredicateTable) {
        static CTX: OnceLock<(Space, IntersectionModel, PredicateTable)> = OnceLock::new();
        let (s, m, t) = CTX.get_or_init(|| {
            let space = Space::build(Kind::Projective, 3, 2).unwrap();
            let model = IntersectionModel::from_space(&space);
            (space, model, PredicateTable::new())
        });
        (s, m, t)
    }

    #[test]
    fn scope_labels_round_trip() {
        for text in ["exhaustive", "sym-reduced", "sampled:250", "orbit-reps"] {
            assert_eq!(ScopeMode::parse(text).unwrap().label(), text);
        }
        assert_eq!(ScopeMode::parse("sampled").unwrap(), ScopeMode::Sampled { count: 100_000 });
        assert!(ScopeMode::parse("everything").is_err());
        assert!(ScopeMode::parse("sampled:lots").is_err());
    }

    #[test]
    fn tuple_generators_count_correctly() {
        assert_eq!(ordered_tuples(5, 2).unwrap().len(), 25);
        assert_eq!(ordered_tuples(5, 0).unwrap(), vec![Vec::<LineId>::new()]);
        let inc = increasing_tuples(5, 3);
        assert_eq!(inc.len(), 10); // C(5,3)
        assert!(inc.iter().all(|t| t[0] < t[1] && t[1] < t[2]));
        assert_eq!(increasing_tuples(3, 4).len(), 0);
    }

    #[test]
    fn a_distinctness_sweep_agrees_exhaustively() {
        let (space, model, tables) = pg32();
        let report = sweep(
            space,
            model,
            tables,
            entry("distinct").unwrap(),
            ScopeMode::Exhaustive,
            EvalBudget::blind(),
            None,
        )
        .unwrap();
        assert_eq!(report.counts.checked, 35 * 35);
        assert_eq!(report.counts.disagree, 0);
        assert_eq!(report.counts.unknown, 0);
        assert_eq!(report.counts.agree, 35 * 35);
        assert_eq!(report.semantic_reads, 0, "a blind sweep must not read coordinates");
        assert_eq!(report.exit_code(false), 0);
    }

    #[test]
    fn orbit_scope_lists_the_intersection_classes() {
        let (space, model, tables) = pg32();
        let report = sweep(
            space,
            model,
            tables,
            entry("distinct").unwrap(),
            ScopeMode::OrbitReps,
            EvalBudget::blind().with_seed(7),
            None,
        )
        .unwrap();
        let orbits = report.orbits.as_ref().unwrap();
        assert!(orbits.contains(&"equal".to_string()));
        assert!(orbits.contains(&"meeting".to_string()));
        assert!(orbits.contains(&"skew".to_string()));
        assert!(!orbits.contains(&"parallel".to_string()), "projective spaces have no parallels");
        assert!(report.counts.checked >= ORBIT_CROSS_CHECK);
    }

    #[test]
    fn reports_are_deterministic_for_a_fixed_seed() {
        let (space, model, tables) = pg32();
        let run = || {
            sweep(
                space,
                model,
                tables,
                entry("S").unwrap(),
                ScopeMode::Sampled { count: 400 },
                EvalBudget::blind().with_seed(41),
                None,
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        let strip = |r: &Report| serde_json::json!([r.counts.checked, r.counts.agree, r.counts.disagree, r.counts.unknown, r.seed, r.nodes]);
        assert_eq!(strip(&a), strip(&b));
        let c = sweep(
            space,
            model,
            tables,
            entry("S").unwrap(),
            ScopeMode::Sampled { count: 400 },
            EvalBudget::blind().with_seed(42),
            None,
        )
        .unwrap();
        assert_eq!(c.counts.checked, 400);
    }

    #[test]
    fn a_sweep_rejects_a_space_outside_the_guard() {
        let (space, model, tables) = pg32();
        let err = sweep(
            space,
            model,
            tables,
            entry("notsim_even").unwrap(),
            ScopeMode::Exhaustive,
            EvalBudget::blind(),
            None,
        )
        .err()
        .unwrap();
        assert!(err.to_string().contains("not defined"));
    }

    #[test]
    fn sampled_carrier_pairs_stay_in_the_carrier_domain() {
        let (space, model, tables) = pg32();
        let report = sweep(
            space,
            model,
            tables,
            entry("eqminus").unwrap(),
            ScopeMode::Sampled { count: 64 },
            EvalBudget::blind().with_seed(3),
            None,
        )
        .unwrap();
        assert_eq!(report.counts.checked, 64);
        assert_eq!(report.counts.unknown, 0);
    }

    #[test]
    fn report_json_keeps_a_stable_key_order() {
        let (space, model, tables) = pg32();
        let report = sweep(
            space,
            model,
            tables,
            entry("distinct").unwrap(),
            ScopeMode::Sampled { count: 10 },
            EvalBudget::blind(),
            None,
        )
        .unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let keys: Vec<usize> = ["\"space\"", "\"predicate\"", "\"scope\"", "\"counts\"", "\"witnesses\"", "\"seed\"", "\"elapsed_ms\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "keys out of order in {json}");
    }
}

//! The predicate dispatch table: one entry per defined predicate, tying
//! together its corpus name, the hand-coded evaluator call, the dimension
//! guard, and the coordinate oracle whose claimed equivalence the sweeps
//! check.

use defined_predicates::{Eval, EvalResult};
use finite_geometry::{MeetResult, PointId, Space, TripleClass};
use line_graph::{LineId, ModelKind, ModelParams};

/// Domain a sweep quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    /// Every tuple of the arity.
    All,
    /// Ordered pairs of distinct intersecting lines.
    MeetingPairs,
    /// Ordered pairs of skew lines.
    SkewPairs,
    /// Ordered pairs of distinct disjoint lines (skew or parallel).
    DisjointPairs,
    /// Pairs of carrier triples (each a triangle or a concurrent
    /// non-coplanar triple), laid out as six-tuples.
    CarrierPairs,
}

impl Filter {
    pub fn label(&self) -> &'static str {
        match self {
            Filter::All => "all",
            Filter::MeetingPairs => "meeting-pairs",
            Filter::SkewPairs => "skew-pairs",
            Filter::DisjointPairs => "disjoint-pairs",
            Filter::CarrierPairs => "carrier-pairs",
        }
    }

    pub fn parse(text: &str) -> Option<Filter> {
        Some(match text {
            "all" => Filter::All,
            "meeting-pairs" => Filter::MeetingPairs,
            "skew-pairs" => Filter::SkewPairs,
            "disjoint-pairs" => Filter::DisjointPairs,
            "carrier-pairs" => Filter::CarrierPairs,
            _ => return None,
        })
    }

    /// Whether an already-materialised tuple belongs to the domain.
    pub fn accepts(&self, space: &Space, t: &[LineId]) -> bool {
        match self {
            Filter::All => true,
            Filter::MeetingPairs => space.meet(t[0], t[1]).is_point(),
            Filter::SkewPairs => space.meet(t[0], t[1]) == MeetResult::Skew,
            Filter::DisjointPairs => {
                matches!(space.meet(t[0], t[1]), MeetResult::Skew | MeetResult::Parallel)
            }
            Filter::CarrierPairs => {
                carrier_kind(space, &t[..3]).is_some() && carrier_kind(space, &t[3..]).is_some()
            }
        }
    }
}

/// One verifiable predicate.
pub struct Entry {
    /// Corpus name; the primary CLI name.
    pub name: &'static str,
    /// Hand-coded evaluator name, accepted as an alias.
    pub alias: &'static str,
    pub arity: usize,
    /// Spaces the predicate is defined on.
    pub admits: fn(&ModelParams) -> bool,
    /// Domain of the claimed equivalence.
    pub filter: Filter,
    pub eval: fn(&Eval, &[LineId]) -> defined_predicates::Result<EvalResult>,
    pub oracle: fn(&Space, &[LineId]) -> bool,
    /// What the oracle decides, for reports.
    pub oracle_name: &'static str,
}

/// Look an entry up by corpus name or evaluator alias.
pub fn entry(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name || e.alias == name)
}

pub fn entry_names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

// Dimension guards, mirroring the hand-coded evaluators.
fn any_space(_: &ModelParams) -> bool {
    true
}
fn proj_even(p: &ModelParams) -> bool {
    p.kind == ModelKind::Projective && p.n >= 4 && p.n % 2 == 0
}
fn proj_odd(p: &ModelParams) -> bool {
    p.kind == ModelKind::Projective && p.n >= 5 && p.n % 2 == 1
}
fn proj_three(p: &ModelParams) -> bool {
    p.kind == ModelKind::Projective && p.n == 3
}
fn affine(p: &ModelParams) -> bool {
    p.kind == ModelKind::Affine
}
fn affine_big_field(p: &ModelParams) -> bool {
    p.kind == ModelKind::Affine && p.q >= 3
}
fn affine_low_dim(p: &ModelParams) -> bool {
    p.kind == ModelKind::Affine && (3..=4).contains(&p.n)
}
fn affine_even(p: &ModelParams) -> bool {
    p.kind == ModelKind::Affine && p.n == 4 && p.q >= 3
}
fn affine_odd(p: &ModelParams) -> bool {
    p.kind == ModelKind::Affine && p.n == 3
}
fn affine_dispatch(p: &ModelParams) -> bool {
    affine_odd(p) || affine_even(p)
}

// Evaluator shims normalising every call to a flat argument slice.
fn call_s(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.s_def(t[0], t[1], t[2])
}
fn call_sbar(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.sbar_def(t[0], t[1], t[2])
}
fn call_hash(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.hash_def(t[0], t[1], t[2], t[3])
}
fn call_distinct(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.neq_def(t[0], t[1])
}
fn call_notsim_even(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.notsim_proj_even(t[0], t[1])
}
fn call_notsim_odd(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.notsim_proj_odd(t[0], t[1])
}
fn call_t(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.t_def(t[0], t[1], t[2])
}
fn call_eqplus(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.equiv_plus([t[0], t[1], t[2]], [t[3], t[4], t[5]])
}
fn call_eqminus(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.equiv_minus([t[0], t[1], t[2]], [t[3], t[4], t[5]])
}
fn call_eqoplus(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.equiv_oplus([t[0], t[1], t[2]], [t[3], t[4], t[5]])
}
fn call_sigma(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.sigma_def(t[0], t[1])
}
fn call_notsim3(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.notsim_proj3(t[0], t[1])
}
fn call_alpha(e: &Eval, _: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.alpha_def()
}
fn call_beta(e: &Eval, _: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.beta_def()
}
fn call_gamma(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.gamma_def(t[0], t[1])
}
fn call_pi(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.pi_def(t[0], t[1])
}
fn call_m(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.m_def(&[t[0], t[1]], t[2])
}
fn call_mq(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    let steps = e.model().params().r as usize;
    e.mq_def(&[t[0], t[1]], steps, t[2])
}
fn call_delta0(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.delta0_def(t[0], t[1])
}
fn call_delta1(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.delta1_def(t[0], t[1])
}
fn call_allgemein(e: &Eval, t: &[LineId]) -> defined_predicates::Result<EvalResult> {
    e.notsim_affine(t[0], t[1])
}

// Coordinate oracles. These run in the oracle phase, before the model-only
// evaluation phase; the purity audit depends on that ordering.
fn o_concurrent(s: &Space, t: &[LineId]) -> bool {
    s.oracle_concurrent(t[0], t[1], t[2])
}
fn o_pencil_member(s: &Space, t: &[LineId]) -> bool {
    match s.meet(t[0], t[1]) {
        MeetResult::Point(p) => s.line(t[2]).points.binary_search(&p).is_ok(),
        _ => false,
    }
}
fn o_meet_diff(s: &Space, t: &[LineId]) -> bool {
    s.oracle_meet_diff(t[0], t[1], t[2], t[3])
}
fn o_id_distinct(_: &Space, t: &[LineId]) -> bool {
    t[0] != t[1]
}
fn o_equal_or_skew(s: &Space, t: &[LineId]) -> bool {
    t[0] == t[1] || s.meet(t[0], t[1]) == MeetResult::Skew
}
fn o_carrier_triple(s: &Space, t: &[LineId]) -> bool {
    carrier_kind(s, t).is_some()
}
fn o_same_kind(s: &Space, t: &[LineId]) -> bool {
    match (carrier_kind(s, &t[..3]), carrier_kind(s, &t[3..])) {
        (Some(k1), Some(k2)) => k1 == k2,
        _ => false,
    }
}
fn o_mixed_kind(s: &Space, t: &[LineId]) -> bool {
    match (carrier_kind(s, &t[..3]), carrier_kind(s, &t[3..])) {
        (Some(k1), Some(k2)) => k1 != k2,
        _ => false,
    }
}
fn o_distinct_carrier(s: &Space, t: &[LineId]) -> bool {
    match (carrier_kind(s, &t[..3]), carrier_kind(s, &t[3..])) {
        (Some(k1), Some(k2)) if k1 == k2 => {
            carrier_of(s, &t[..3]) != carrier_of(s, &t[3..])
        }
        _ => false,
    }
}
fn o_skew(s: &Space, t: &[LineId]) -> bool {
    s.meet(t[0], t[1]) == MeetResult::Skew
}
fn o_line_ceiling(s: &Space, _: &[LineId]) -> bool {
    s.line_count() as u64 <= s.params().k
}
fn o_clique_floor(s: &Space, _: &[LineId]) -> bool {
    let need = 1usize << s.params().n;
    crate::clique::CliqueSearch::from_space(s).find_clique(need).is_some()
}
fn o_equal_or_disjoint(s: &Space, t: &[LineId]) -> bool {
    t[0] == t[1] || matches!(s.meet(t[0], t[1]), MeetResult::Skew | MeetResult::Parallel)
}
fn o_coplanar(s: &Space, t: &[LineId]) -> bool {
    s.oracle_coplanar(t[0], t[1])
}
fn o_reach_one(s: &Space, t: &[LineId]) -> bool {
    t[2] == t[0] || t[2] == t[1] || s.oracle_meet_diff(t[0], t[2], t[1], t[2])
}
fn o_reach_chain(s: &Space, t: &[LineId]) -> bool {
    mq_closure(s, t[0], t[1]).binary_search(&t[2]).is_ok()
}

/// Carrier kind of a triple: triangle or concurrent non-coplanar.
fn carrier_kind(s: &Space, t: &[LineId]) -> Option<TripleClass> {
    match s.oracle_classify3(t[0], t[1], t[2]) {
        c @ (TripleClass::Triangle | TripleClass::ConcurrentNonCoplanar) => Some(c),
        _ => None,
    }
}

/// Carrier fingerprint: the plane's point set, or the vertex.
fn carrier_of(s: &Space, t: &[LineId]) -> Vec<PointId> {
    match s.oracle_classify3(t[0], t[1], t[2]) {
        TripleClass::Triangle => {
            let mut plane = s.oracle_trilateral_plane(t[0], t[1], t[2]).expect("triangle carrier");
            plane.sort_unstable();
            plane
        }
        TripleClass::ConcurrentNonCoplanar => {
            vec![s.oracle_tripod_vertex(t[0], t[1], t[2]).expect("tripod vertex")]
        }
        _ => unreachable!("carrier requested for a non-carrier triple"),
    }
}

/// Closure of `{a, b}` under bounded-step reachability: each step adjoins
/// every line crossing some two current members at different points.
fn mq_closure(s: &Space, a: LineId, b: LineId) -> Vec<LineId> {
    let mut closure = vec![a, b];
    closure.sort_unstable();
    closure.dedup();
    for _ in 0..s.params().r {
        let mut next = closure.clone();
        for x in 0..s.line_count() as LineId {
            if closure.binary_search(&x).is_ok() {
                continue;
            }
            let hit = closure.iter().enumerate().any(|(i, &u)| {
                closure[i + 1..].iter().any(|&v| s.oracle_meet_diff(u, x, v, x))
            });
            if hit {
                next.push(x);
            }
        }
        next.sort_unstable();
        if next.len() == closure.len() {
            break;
        }
        closure = next;
    }
    closure
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "S", alias: "s_def", arity: 3, admits: any_space, filter: Filter::All, eval: call_s, oracle: o_concurrent, oracle_name: "concurrent" },
    Entry { name: "Sbar", alias: "sbar_def", arity: 3, admits: any_space, filter: Filter::All, eval: call_sbar, oracle: o_pencil_member, oracle_name: "pencil-member" },
    Entry { name: "hash", alias: "hash_def", arity: 4, admits: any_space, filter: Filter::All, eval: call_hash, oracle: o_meet_diff, oracle_name: "meet-diff" },
    Entry { name: "distinct", alias: "neq_def", arity: 2, admits: any_space, filter: Filter::All, eval: call_distinct, oracle: o_id_distinct, oracle_name: "id-distinct" },
    Entry { name: "notsim_even", alias: "notsim_proj_even", arity: 2, admits: proj_even, filter: Filter::All, eval: call_notsim_even, oracle: o_equal_or_skew, oracle_name: "equal-or-skew" },
    Entry { name: "notsim_odd", alias: "notsim_proj_odd", arity: 2, admits: proj_odd, filter: Filter::All, eval: call_notsim_odd, oracle: o_equal_or_skew, oracle_name: "equal-or-skew" },
    Entry { name: "T", alias: "t_def", arity: 3, admits: proj_three, filter: Filter::All, eval: call_t, oracle: o_carrier_triple, oracle_name: "carrier-triple" },
    Entry { name: "eqplus", alias: "equiv_plus", arity: 6, admits: proj_three, filter: Filter::CarrierPairs, eval: call_eqplus, oracle: o_same_kind, oracle_name: "same-kind" },
    Entry { name: "eqminus", alias: "equiv_minus", arity: 6, admits: proj_three, filter: Filter::CarrierPairs, eval: call_eqminus, oracle: o_mixed_kind, oracle_name: "mixed-kind" },
    Entry { name: "eqoplus", alias: "equiv_oplus", arity: 6, admits: proj_three, filter: Filter::CarrierPairs, eval: call_eqoplus, oracle: o_distinct_carrier, oracle_name: "distinct-carrier" },
    Entry { name: "sigma", alias: "sigma_def", arity: 2, admits: proj_three, filter: Filter::All, eval: call_sigma, oracle: o_skew, oracle_name: "skew" },
    Entry { name: "notsim3", alias: "notsim_proj3", arity: 2, admits: proj_three, filter: Filter::All, eval: call_notsim3, oracle: o_equal_or_skew, oracle_name: "equal-or-skew" },
    Entry { name: "alpha", alias: "alpha_def", arity: 0, admits: affine, filter: Filter::All, eval: call_alpha, oracle: o_line_ceiling, oracle_name: "line-ceiling" },
    Entry { name: "beta", alias: "beta_def", arity: 0, admits: affine, filter: Filter::All, eval: call_beta, oracle: o_clique_floor, oracle_name: "clique-floor" },
    Entry { name: "gamma", alias: "gamma_def", arity: 2, admits: affine, filter: Filter::All, eval: call_gamma, oracle: o_equal_or_disjoint, oracle_name: "equal-or-disjoint" },
    Entry { name: "pi", alias: "pi_def", arity: 2, admits: affine_big_field, filter: Filter::All, eval: call_pi, oracle: o_coplanar, oracle_name: "coplanar" },
    Entry { name: "M", alias: "m_def", arity: 3, admits: affine_low_dim, filter: Filter::All, eval: call_m, oracle: o_reach_one, oracle_name: "one-step-reach" },
    Entry { name: "Mq", alias: "mq_def", arity: 3, admits: affine_low_dim, filter: Filter::All, eval: call_mq, oracle: o_reach_chain, oracle_name: "chain-reach" },
    Entry { name: "delta0", alias: "delta0_def", arity: 2, admits: affine_even, filter: Filter::All, eval: call_delta0, oracle: o_equal_or_disjoint, oracle_name: "equal-or-disjoint" },
    Entry { name: "delta1", alias: "delta1_def", arity: 2, admits: affine_odd, filter: Filter::All, eval: call_delta1, oracle: o_equal_or_disjoint, oracle_name: "equal-or-disjoint" },
    Entry { name: "allgemein", alias: "notsim_affine", arity: 2, admits: affine_dispatch, filter: Filter::All, eval: call_allgemein, oracle: o_equal_or_disjoint, oracle_name: "equal-or-disjoint" },
];

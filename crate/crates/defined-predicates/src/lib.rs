//! Evaluators for the defined predicates of the line-intersection language.
//!
//! Each public operation evaluates a first-order formula whose only atoms
//! are the intersection relation, line equality, and quantifiers ranging
//! over the whole line universe. The evaluators read nothing but an
//! [`IntersectionModel`] — this crate cannot even name a coordinate type —
//! so truth values provably depend on the intersection relation alone.
//!
//! Three quantifier strategies, chosen by [`Mode`]:
//!
//! * **Blind** — exhaustive sweeps with sound pruning: a candidate is
//!   skipped only when the matrix provably fails on it, so `True` and
//!   `False` are both definitive.
//! * **Guided** — a [`WitnessProvider`] proposes witnesses for existential
//!   blocks. Every proposal is re-verified against the intersection
//!   relation before acceptance, so a guided `True` is sound; a missing or
//!   failing proposal yields `Unknown`, never `False` (except where a
//!   cheap structural check refutes outright).
//! * **GuidedThenBlind** — guided first, with a blind fallback per
//!   existential block.
//!
//! `Unknown` also results from an exhausted node budget. Memo tables in
//! [`PredicateTable`] cache definitive sub-results only.

use line_graph::{IntersectionModel, LineId, LineSet, PredicateTable};

pub use line_graph::{EvalBudget, Mode, Tri};

mod affine;
mod carriers;
mod concurrence;
mod crossing;
mod dim3;
mod skewness;

#[cfg(test)]
pub(crate) mod test_support;

/// A bound-variable assignment transcript: which line each quantified
/// variable of the outermost existential block was bound to.
pub type Transcript = Vec<(&'static str, LineId)>;

/// Outcome of one predicate evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub value: Tri,
    /// Quantifier bindings examined (bitset-accelerated inner blocks and
    /// memo hits count once). Shared-table warm-up is not charged.
    pub nodes_used: u64,
    /// For `True` results: a verifying assignment for the outermost
    /// existential block (empty when the formula has none). `None`
    /// otherwise.
    pub witnesses: Option<Transcript>,
}

#[derive(Debug, thiserror::Error)]
pub enum PredicateError {
    #[error("line id {id} out of range for a model with {count} lines")]
    InvalidId { id: LineId, count: usize },
    #[error("{need} required, model is {got}")]
    WrongDimension { need: String, got: String },
    #[error("predicate `{name}` takes {want} line arguments, got {got}")]
    BadArity {
        name: &'static str,
        want: usize,
        got: usize,
    },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
}

pub type Result<T> = std::result::Result<T, PredicateError>;

/// Witness suggestions for the existential blocks of the defined
/// predicates. Implementations may consult anything they like (including
/// coordinates); every suggestion is re-verified against the intersection
/// relation before it decides anything, so providers can only speed
/// evaluation up, never change a value. Return `None` to decline.
///
/// Implementations must be deterministic given the same arguments.
pub trait WitnessProvider: Sync {
    /// Crossing predicate, per universal line `g`: a pair `(h1, h2)` for
    /// the transversal branch of the matrix.
    fn hash_pair(&self, pairs: [LineId; 4], g: LineId) -> Option<(LineId, LineId)> {
        let _ = (pairs, g);
        None
    }

    /// Skewness chains: the `want` extension lines bound by the leading
    /// existential block.
    fn skew_extension(&self, a1: LineId, b1: LineId, want: usize) -> Option<Vec<LineId>> {
        let _ = (a1, b1, want);
        None
    }

    /// Even-dimension skewness chain for one universal line `g`:
    /// `b_2 ... b_{m+1}` over the bound lines `a = [a_1 ... a_m]`.
    fn even_chain(&self, a: &[LineId], b1: LineId, g: LineId) -> Option<Vec<LineId>> {
        let _ = (a, b1, g);
        None
    }

    /// Odd-dimension skewness chains for one universal line `g`: the pair
    /// of chains `(b_2 ... b_{m+1}, c_2 ... c_{m+1})`.
    fn odd_chains(
        &self,
        a: &[LineId],
        b1: LineId,
        g: LineId,
    ) -> Option<(Vec<LineId>, Vec<LineId>)> {
        let _ = (a, b1, g);
        None
    }

    /// Carrier predicate, per universal pair `(g1, g2)`: the triple
    /// `(x1, x2, x3)`.
    fn carrier_triple(&self, t: [LineId; 3], g1: LineId, g2: LineId) -> Option<[LineId; 3]> {
        let _ = (t, g1, g2);
        None
    }

    /// Same-kind carrier congruence, per universal `g`: the two rows of
    /// three section lines.
    fn equiv_plus_rows(
        &self,
        t1: [LineId; 3],
        t2: [LineId; 3],
        g: LineId,
    ) -> Option<[[LineId; 3]; 2]> {
        let _ = (t1, t2, g);
        None
    }

    /// Mixed-kind carrier congruence, per universal `g`: `(x1, x2)`.
    fn equiv_minus_pair(
        &self,
        t1: [LineId; 3],
        t2: [LineId; 3],
        g: LineId,
    ) -> Option<(LineId, LineId)> {
        let _ = (t1, t2, g);
        None
    }

    /// Distinct-carrier congruence: `(x1, x2, x3)`.
    fn oplus_triple(&self, t1: [LineId; 3], t2: [LineId; 3]) -> Option<[LineId; 3]> {
        let _ = (t1, t2);
        None
    }

    /// Three-dimensional skewness, per universal `g`: the tuple
    /// `(x, a1, a2, b1, b2)`.
    fn sigma_tuple(&self, a: LineId, b: LineId, g: LineId) -> Option<[LineId; 5]> {
        let _ = (a, b, g);
        None
    }

    /// Stepwise-reachability chain `b_1 ... b_q` (length at most `steps`)
    /// from the base list toward `target`.
    fn mr_chain(&self, base: &[LineId], target: LineId, steps: usize) -> Option<Vec<LineId>> {
        let _ = (base, target, steps);
        None
    }

    /// Even-dimension disjointness, per universal `g`: a line `h` meant to
    /// be coplanar with `g` and reachable from the base list.
    fn coplanar_partner(&self, base: &[LineId], g: LineId) -> Option<LineId> {
        let _ = (base, g);
        None
    }
}

/// Per-evaluation bookkeeping: node budget and the witness transcript of
/// the outermost call.
pub(crate) struct Run {
    nodes: u64,
    limit: u64,
    exhausted: bool,
    depth: u32,
    witness: Transcript,
}

impl Run {
    fn new(budget: &EvalBudget) -> Self {
        Run {
            nodes: 0,
            limit: budget.max_nodes,
            exhausted: false,
            depth: 0,
            witness: Vec::new(),
        }
    }

    /// Account for `n` quantifier bindings; false once the budget is gone.
    #[inline]
    pub(crate) fn charge(&mut self, n: u64) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes = self.nodes.saturating_add(n);
        if self.nodes > self.limit {
            self.exhausted = true;
            false
        } else {
            true
        }
    }

    #[inline]
    pub(crate) fn spent(&self) -> bool {
        self.exhausted
    }

    /// Record a witness for the outermost existential block. No-op inside
    /// sub-predicate calls and after a first witness is recorded.
    pub(crate) fn offer<F: FnOnce() -> Transcript>(&mut self, entries: F) {
        if self.depth == 0 && self.witness.is_empty() {
            self.witness = entries();
        }
    }

    /// Bracket a sub-predicate call so it does not claim the witness slot.
    #[inline]
    pub(crate) fn enter(&mut self) {
        self.depth += 1;
    }

    #[inline]
    pub(crate) fn leave(&mut self) {
        self.depth -= 1;
    }
}

/// Evaluation handle bundling the model, the shared memo tables, the
/// budget, and an optional witness provider.
pub struct Eval<'a> {
    model: &'a IntersectionModel,
    tables: &'a PredicateTable,
    budget: EvalBudget,
    provider: Option<&'a dyn WitnessProvider>,
}

impl<'a> Eval<'a> {
    pub fn new(model: &'a IntersectionModel, tables: &'a PredicateTable, budget: EvalBudget) -> Self {
        Eval {
            model,
            tables,
            budget,
            provider: None,
        }
    }

    pub fn with_provider(
        model: &'a IntersectionModel,
        tables: &'a PredicateTable,
        budget: EvalBudget,
        provider: &'a dyn WitnessProvider,
    ) -> Self {
        Eval {
            model,
            tables,
            budget,
            provider: Some(provider),
        }
    }

    pub fn model(&self) -> &IntersectionModel {
        self.model
    }

    pub fn tables(&self) -> &PredicateTable {
        self.tables
    }

    // ---- shared plumbing ------------------------------------------------

    pub(crate) fn l(&self) -> usize {
        self.model.line_count()
    }

    #[inline]
    pub(crate) fn sim(&self, a: LineId, b: LineId) -> bool {
        self.model.sim(a, b)
    }

    /// Neighbor set of `a` as an owned bitset.
    pub(crate) fn nbrs(&self, a: LineId) -> LineSet {
        LineSet::from_words(self.l(), self.model.row(a).to_vec())
    }

    /// Common neighbors of two lines.
    pub(crate) fn cn2(&self, a: LineId, b: LineId) -> LineSet {
        let mut s = self.nbrs(a);
        s.and_words(self.model.row(b));
        s
    }

    /// Neighbors of `x` together with `x` itself.
    pub(crate) fn simeq_set(&self, x: LineId) -> LineSet {
        let mut s = self.nbrs(x);
        s.insert(x);
        s
    }

    /// The provider, when the mode consults one.
    pub(crate) fn guided(&self) -> Option<&'a dyn WitnessProvider> {
        match self.budget.mode {
            Mode::Blind => None,
            Mode::Guided | Mode::GuidedThenBlind => self.provider,
        }
    }

    /// In `GuidedThenBlind` a failed suggestion falls back to blind search;
    /// in `Guided` it leaves the block unknown.
    pub(crate) fn falls_back(&self) -> bool {
        self.budget.mode != Mode::Guided
    }

    pub(crate) fn run(&self) -> Run {
        Run::new(&self.budget)
    }

    pub(crate) fn finish(&self, run: Run, value: Tri) -> EvalResult {
        EvalResult {
            value,
            nodes_used: run.nodes,
            witnesses: if value == Tri::True {
                Some(run.witness)
            } else {
                None
            },
        }
    }

    // ---- argument and dimension guards ---------------------------------

    pub(crate) fn check_ids(&self, ids: &[LineId]) -> Result<()> {
        let count = self.l();
        for &id in ids {
            if id as usize >= count {
                return Err(PredicateError::InvalidId { id, count });
            }
        }
        Ok(())
    }

    fn model_desc(&self) -> String {
        let p = self.model.params();
        format!("{} n={} q={}", p.kind.tag(), p.n, p.q)
    }

    pub(crate) fn guard_any(&self) -> Result<()> {
        if self.model.params().n >= 3 {
            Ok(())
        } else {
            Err(PredicateError::WrongDimension {
                need: "a model of dimension at least 3".into(),
                got: self.model_desc(),
            })
        }
    }

    pub(crate) fn guard_projective(&self, n_min: u32, parity: Option<u32>) -> Result<()> {
        let p = self.model.params();
        let ok = p.kind == line_graph::ModelKind::Projective
            && p.n >= n_min
            && parity.map_or(true, |r| p.n % 2 == r);
        if ok {
            Ok(())
        } else {
            let need = match parity {
                Some(0) => format!("a projective model of even dimension at least {n_min}"),
                Some(_) => format!("a projective model of odd dimension at least {n_min}"),
                None => format!("a projective model of dimension at least {n_min}"),
            };
            Err(PredicateError::WrongDimension {
                need,
                got: self.model_desc(),
            })
        }
    }

    pub(crate) fn guard_projective_exact(&self, n: u32) -> Result<()> {
        let p = self.model.params();
        if p.kind == line_graph::ModelKind::Projective && p.n == n {
            Ok(())
        } else {
            Err(PredicateError::WrongDimension {
                need: format!("a projective model with n = {n}"),
                got: self.model_desc(),
            })
        }
    }

    pub(crate) fn guard_affine(&self, q_min: u32, parity: Option<u32>) -> Result<()> {
        let p = self.model.params();
        let ok = p.kind == line_graph::ModelKind::Affine
            && p.q >= q_min
            && parity.map_or(true, |r| p.n % 2 == r);
        if ok {
            Ok(())
        } else {
            let need = match (q_min, parity) {
                (q, Some(0)) if q > 2 => {
                    format!("an affine model of even dimension with q >= {q}")
                }
                (q, Some(_)) if q > 2 => format!("an affine model of odd dimension with q >= {q}"),
                (_, Some(0)) => "an affine model of even dimension".to_string(),
                (_, Some(_)) => "an affine model of odd dimension".to_string(),
                (q, None) if q > 2 => format!("an affine model with q >= {q}"),
                _ => "an affine model".to_string(),
            };
            Err(PredicateError::WrongDimension {
                need,
                got: self.model_desc(),
            })
        }
    }

    // ---- dispatch by name ----------------------------------------------

    /// Number of line arguments `name` takes on this model (`m`-dependent
    /// for the reachability predicates), or `None` for an unknown name.
    pub fn arity_of(&self, name: &str) -> Option<usize> {
        let m = self.model.params().m as usize;
        Some(match name {
            "s" | "sbar" | "t" => 3,
            "hash" => 4,
            "neq" | "notsim_even" | "notsim_odd" | "sigma" | "notsim3" | "gamma" | "pi"
            | "delta0" | "delta1" | "notsim_affine" => 2,
            "eqplus" | "eqminus" | "eqoplus" => 6,
            "alpha" | "beta" => 0,
            "m" | "mq" => m + 1,
            _ => return None,
        })
    }

    /// Evaluate a predicate by its surface name. For `mq` the chain length
    /// is the model's canonical step count `r`.
    pub fn eval_named(&self, name: &str, args: &[LineId]) -> Result<EvalResult> {
        let want = self
            .arity_of(name)
            .ok_or_else(|| PredicateError::UnknownPredicate(name.to_string()))?;
        if args.len() != want {
            static NAMES: &[&str] = &[
                "s",
                "sbar",
                "hash",
                "neq",
                "notsim_even",
                "notsim_odd",
                "t",
                "eqplus",
                "eqminus",
                "eqoplus",
                "sigma",
                "notsim3",
                "alpha",
                "beta",
                "gamma",
                "pi",
                "m",
                "mq",
                "delta0",
                "delta1",
                "notsim_affine",
            ];
            let name_static = NAMES
                .iter()
                .find(|&&n| n == name)
                .copied()
                .unwrap_or("predicate");
            return Err(PredicateError::BadArity {
                name: name_static,
                want,
                got: args.len(),
            });
        }
        let t1 = |i: usize| [args[i], args[i + 1], args[i + 2]];
        match name {
            "s" => self.s_def(args[0], args[1], args[2]),
            "sbar" => self.sbar_def(args[0], args[1], args[2]),
            "hash" => self.hash_def(args[0], args[1], args[2], args[3]),
            "neq" => self.neq_def(args[0], args[1]),
            "notsim_even" => self.notsim_proj_even(args[0], args[1]),
            "notsim_odd" => self.notsim_proj_odd(args[0], args[1]),
            "t" => self.t_def(args[0], args[1], args[2]),
            "eqplus" => self.equiv_plus(t1(0), t1(3)),
            "eqminus" => self.equiv_minus(t1(0), t1(3)),
            "eqoplus" => self.equiv_oplus(t1(0), t1(3)),
            "sigma" => self.sigma_def(args[0], args[1]),
            "notsim3" => self.notsim_proj3(args[0], args[1]),
            "alpha" => self.alpha_def(),
            "beta" => self.beta_def(),
            "gamma" => self.gamma_def(args[0], args[1]),
            "pi" => self.pi_def(args[0], args[1]),
            "m" => self.m_def(&args[..args.len() - 1], args[args.len() - 1]),
            "mq" => {
                let r = self.model.params().r as usize;
                self.mq_def(&args[..args.len() - 1], r, args[args.len() - 1])
            }
            "delta0" => self.delta0_def(args[0], args[1]),
            "delta1" => self.delta1_def(args[0], args[1]),
            "notsim_affine" => self.notsim_affine(args[0], args[1]),
            _ => unreachable!("arity_of accepted the name"),
        }
    }
}

/// Names for transcript entries of numbered variables, indexed from 1.
pub(crate) fn chain_name(prefix: &str, index: usize) -> &'static str {
    const A: &[&str] = &["a1", "a2", "a3", "a4", "a5", "a6"];
    const B: &[&str] = &["b1", "b2", "b3", "b4", "b5", "b6"];
    const C: &[&str] = &["c1", "c2", "c3", "c4", "c5", "c6"];
    const X: &[&str] = &[
        "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13", "x14",
        "x15", "x16",
    ];
    let table: &[&str] = match prefix {
        "a" => A,
        "b" => B,
        "c" => C,
        _ => X,
    };
    table.get(index.wrapping_sub(1)).copied().unwrap_or("v")
}

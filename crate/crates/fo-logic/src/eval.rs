//! Tarski-style evaluation of parsed definitions over an intersection model.
//!
//! Quantifiers range over the whole line set and are searched exhaustively —
//! there is no witness guidance here; this evaluator exists to cross-check
//! the hand-coded predicates, so it must not share their shortcuts. The only
//! concessions to tractability are structural: definition calls are memoised
//! per argument tuple, conjuncts that ignore an `exists` block's variables
//! are checked before the search starts, and each remaining conjunct is
//! tested as soon as the last variable it mentions has been assigned.
//!
//! Evaluation is three-valued. `Unknown` arises from budget exhaustion only;
//! a completed search always returns a definite answer. A definition whose
//! body is literally the pigeonhole statement — `forall` over k variables of
//! the disjunction of all pairwise equalities — is recognised at compile
//! time and can be answered as `line_count <= k - 1` instead of by the k-fold
//! nested loop; sessions evaluate such bodies via the shortcut unless it is
//! switched off, in which case the literal loop runs (and exhausts any
//! realistic budget, yielding `Unknown`).

use crate::ast::{Definition, Formula};
use crate::FoError;
use dashmap::DashMap;
use line_graph::{IntersectionModel, LineId, Tri};
use std::collections::HashMap;

/// Compiled formula: variables resolved to assignment slots, predicate
/// references resolved to definition indices.
#[derive(Clone, Debug)]
enum Cf {
    Forall(usize, Box<Cf>),
    /// `forall g1 .. gk . OR of all pairwise eq(gi, gj)`, kept with its
    /// literal compilation so the shortcut can be switched off.
    Pigeonhole { var_count: usize, literal: Box<Cf> },
    Exists {
        vars: Vec<usize>,
        /// Conjuncts not mentioning any block variable; checked up front.
        hoisted: Vec<Cf>,
        /// `sched[i]`: conjuncts whose last-assigned block variable is
        /// `vars[i]`; checked as soon as that variable gets a value.
        sched: Vec<Vec<Cf>>,
    },
    And(Vec<Cf>),
    Or(Vec<Cf>),
    Sim(usize, usize),
    Eq(usize, usize),
    NotEq(usize, usize),
    Pred { def: usize, args: Vec<usize> },
}

impl Cf {
    fn mentions_any(&self, slots: &[usize]) -> bool {
        let hit = |s: &usize| slots.contains(s);
        match self {
            Cf::Forall(_, body) => body.mentions_any(slots),
            Cf::Pigeonhole { literal, .. } => literal.mentions_any(slots),
            Cf::Exists { hoisted, sched, .. } => {
                hoisted.iter().any(|c| c.mentions_any(slots))
                    || sched.iter().flatten().any(|c| c.mentions_any(slots))
            }
            Cf::And(parts) | Cf::Or(parts) => parts.iter().any(|c| c.mentions_any(slots)),
            Cf::Sim(a, b) | Cf::Eq(a, b) | Cf::NotEq(a, b) => hit(a) || hit(b),
            Cf::Pred { args, .. } => args.iter().any(hit),
        }
    }
}

struct CompiledDef {
    name: String,
    arity: usize,
    slots: usize,
    body: Cf,
}

struct Compiler<'a> {
    index: &'a HashMap<String, usize>,
    arities: &'a [usize],
    scope: Vec<(String, usize)>,
    next_slot: usize,
}

impl Compiler<'_> {
    fn slot(&self, var: &str) -> usize {
        // Parse-time scope checking guarantees the lookup succeeds.
        self.scope.iter().rev().find(|(v, _)| v == var).unwrap().1
    }

    fn bind(&mut self, var: &str) -> usize {
        let s = self.next_slot;
        self.next_slot += 1;
        self.scope.push((var.to_string(), s));
        s
    }

    fn compile(&mut self, f: &Formula) -> Result<Cf, FoError> {
        match f {
            Formula::Forall(_, _) => {
                if let Some(ph) = self.try_pigeonhole(f)? {
                    return Ok(ph);
                }
                self.compile_forall(f)
            }
            Formula::Exists(vars, body) => {
                let depth = self.scope.len();
                let slots: Vec<usize> = vars.iter().map(|v| self.bind(v)).collect();
                let conjuncts = match &**body {
                    Formula::And(parts) => parts.clone(),
                    other => vec![other.clone()],
                };
                let mut hoisted = Vec::new();
                let mut sched: Vec<Vec<Cf>> = vec![Vec::new(); slots.len()];
                for part in &conjuncts {
                    let cf = self.compile(part)?;
                    let last = slots
                        .iter()
                        .enumerate()
                        .rev()
                        .find(|(_, s)| cf.mentions_any(std::slice::from_ref(s)))
                        .map(|(i, _)| i);
                    match last {
                        None => hoisted.push(cf),
                        Some(i) => sched[i].push(cf),
                    }
                }
                self.scope.truncate(depth);
                Ok(Cf::Exists { vars: slots, hoisted, sched })
            }
            Formula::And(parts) => Ok(Cf::And(
                parts.iter().map(|p| self.compile(p)).collect::<Result<_, _>>()?,
            )),
            Formula::Or(parts) => Ok(Cf::Or(
                parts.iter().map(|p| self.compile(p)).collect::<Result<_, _>>()?,
            )),
            Formula::Sim(a, b) => Ok(Cf::Sim(self.slot(a), self.slot(b))),
            Formula::Eq(a, b) => Ok(Cf::Eq(self.slot(a), self.slot(b))),
            Formula::NotEq(a, b) => Ok(Cf::NotEq(self.slot(a), self.slot(b))),
            Formula::PredRef(name, args) => {
                let def = *self
                    .index
                    .get(name)
                    .ok_or_else(|| FoError::UnresolvedPredRef { name: name.clone() })?;
                if self.arities[def] != args.len() {
                    return Err(FoError::Arity {
                        name: name.clone(),
                        want: self.arities[def],
                        got: args.len(),
                    });
                }
                Ok(Cf::Pred { def, args: args.iter().map(|a| self.slot(a)).collect() })
            }
        }
    }

    fn compile_forall(&mut self, f: &Formula) -> Result<Cf, FoError> {
        if let Formula::Forall(var, body) = f {
            let depth = self.scope.len();
            let slot = self.bind(var);
            let body = self.compile(body)?;
            self.scope.truncate(depth);
            Ok(Cf::Forall(slot, Box::new(body)))
        } else {
            self.compile(f)
        }
    }

    /// Recognises `forall g1 .. gk .` over a disjunction of equality atoms
    /// covering exactly the pairwise equalities of the chain variables.
    fn try_pigeonhole(&mut self, f: &Formula) -> Result<Option<Cf>, FoError> {
        let mut chain = Vec::new();
        let mut cursor = f;
        while let Formula::Forall(var, body) = cursor {
            chain.push(var.clone());
            cursor = body;
        }
        if chain.len() < 2 {
            return Ok(None);
        }
        let mut leaves = Vec::new();
        if !collect_eq_leaves(cursor, &mut leaves) {
            return Ok(None);
        }
        let pos = |v: &str| chain.iter().position(|c| c == v);
        let mut pairs = std::collections::BTreeSet::new();
        for (a, b) in leaves {
            match (pos(a), pos(b)) {
                (Some(i), Some(j)) if i != j => {
                    pairs.insert((i.min(j), i.max(j)));
                }
                _ => return Ok(None),
            }
        }
        let k = chain.len();
        if pairs.len() != k * (k - 1) / 2 {
            return Ok(None);
        }
        let literal = self.compile_forall(f)?;
        Ok(Some(Cf::Pigeonhole { var_count: k, literal: Box::new(literal) }))
    }
}

fn collect_eq_leaves<'f>(f: &'f Formula, out: &mut Vec<(&'f str, &'f str)>) -> bool {
    match f {
        Formula::Or(parts) => parts.iter().all(|p| collect_eq_leaves(p, out)),
        Formula::Eq(a, b) => {
            out.push((a, b));
            true
        }
        _ => false,
    }
}

/// How far an evaluation got: the answer plus the node count it consumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub value: Tri,
    pub nodes: u64,
}

/// A set of compiled definitions bound to one model, with a shared
/// memo of definite predicate-call results. Safe to share across threads.
pub struct FoSession<'m> {
    model: &'m IntersectionModel,
    defs: Vec<CompiledDef>,
    index: HashMap<String, usize>,
    memo: DashMap<(usize, Vec<LineId>), bool>,
    /// Answer recognised pigeonhole bodies by comparing the line count
    /// instead of running the literal nested loops.
    pub pigeonhole_shortcut: bool,
}

impl<'m> FoSession<'m> {
    /// Compiles `defs` against `model`. Names must be unique; references may
    /// point at any definition in the slice regardless of order.
    pub fn build(model: &'m IntersectionModel, defs: &[Definition]) -> Result<Self, FoError> {
        let mut index = HashMap::new();
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.name.clone(), i).is_some() {
                return Err(FoError::Duplicate(d.name.clone()));
            }
        }
        let arities: Vec<usize> = defs.iter().map(|d| d.params.len()).collect();
        let mut compiled = Vec::with_capacity(defs.len());
        for d in defs {
            let mut c = Compiler {
                index: &index,
                arities: &arities,
                scope: Vec::new(),
                next_slot: 0,
            };
            for p in &d.params {
                c.bind(p);
            }
            let body = c.compile(&d.body)?;
            compiled.push(CompiledDef {
                name: d.name.clone(),
                arity: d.params.len(),
                slots: c.next_slot,
                body,
            });
        }
        Ok(FoSession {
            model,
            defs: compiled,
            index,
            memo: DashMap::new(),
            pigeonhole_shortcut: true,
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|d| d.name.as_str())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index.get(name).map(|&i| self.defs[i].arity)
    }

    /// Evaluates `name(args)` with at most `budget` search nodes.
    pub fn eval_def(
        &self,
        name: &str,
        args: &[LineId],
        budget: u64,
    ) -> Result<EvalOutcome, FoError> {
        let def = *self
            .index
            .get(name)
            .ok_or_else(|| FoError::UnresolvedPredRef { name: name.to_string() })?;
        if self.defs[def].arity != args.len() {
            return Err(FoError::Arity {
                name: name.to_string(),
                want: self.defs[def].arity,
                got: args.len(),
            });
        }
        let mut run = Run {
            session: self,
            assignment: Vec::new(),
            nodes: 0,
            budget,
            dead: false,
            tainted: false,
        };
        let value = run.call(def, args.to_vec());
        Ok(EvalOutcome { value, nodes: run.nodes })
    }
}

struct Run<'s, 'm> {
    session: &'s FoSession<'m>,
    assignment: Vec<LineId>,
    nodes: u64,
    budget: u64,
    dead: bool,
    /// True while the current `exists` path rests on an Unknown conjunct.
    tainted: bool,
}

impl Run<'_, '_> {
    fn call(&mut self, def: usize, args: Vec<LineId>) -> Tri {
        if let Some(hit) = self.session.memo.get(&(def, args.clone())) {
            return Tri::from_bool(*hit);
        }
        let d = &self.session.defs[def];
        let mut frame = vec![0 as LineId; d.slots];
        frame[..args.len()].copy_from_slice(&args);
        let saved = std::mem::replace(&mut self.assignment, frame);
        let saved_taint = std::mem::replace(&mut self.tainted, false);
        let value = self.eval(&d.body);
        self.assignment = saved;
        self.tainted = saved_taint;
        if value.is_definite() {
            self.session.memo.insert((def, args), value.is_true());
        }
        value
    }

    fn eval(&mut self, cf: &Cf) -> Tri {
        if self.dead {
            return Tri::Unknown;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.dead = true;
            return Tri::Unknown;
        }
        match cf {
            Cf::Sim(a, b) => Tri::from_bool(
                self.session.model.sim(self.assignment[*a], self.assignment[*b]),
            ),
            Cf::Eq(a, b) => Tri::from_bool(self.assignment[*a] == self.assignment[*b]),
            Cf::NotEq(a, b) => Tri::from_bool(self.assignment[*a] != self.assignment[*b]),
            Cf::And(parts) => {
                let mut unknown = false;
                for p in parts {
                    match self.eval(p) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => {
                            if self.dead {
                                return Tri::Unknown;
                            }
                            unknown = true;
                        }
                        Tri::True => {}
                    }
                }
                if unknown {
                    Tri::Unknown
                } else {
                    Tri::True
                }
            }
            Cf::Or(parts) => {
                let mut unknown = false;
                for p in parts {
                    match self.eval(p) {
                        Tri::True => return Tri::True,
                        Tri::Unknown => {
                            if self.dead {
                                return Tri::Unknown;
                            }
                            unknown = true;
                        }
                        Tri::False => {}
                    }
                }
                if unknown {
                    Tri::Unknown
                } else {
                    Tri::False
                }
            }
            Cf::Forall(slot, body) => {
                let n = self.session.model.line_count() as LineId;
                let mut unknown = false;
                for line in 0..n {
                    self.assignment[*slot] = line;
                    match self.eval(body) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => {
                            if self.dead {
                                return Tri::Unknown;
                            }
                            unknown = true;
                        }
                        Tri::True => {}
                    }
                }
                if unknown {
                    Tri::Unknown
                } else {
                    Tri::True
                }
            }
            Cf::Pigeonhole { var_count, literal } => {
                if self.session.pigeonhole_shortcut {
                    Tri::from_bool(self.session.model.line_count() <= var_count - 1)
                } else {
                    self.eval(literal)
                }
            }
            Cf::Pred { def, args } => {
                let vals: Vec<LineId> = args.iter().map(|a| self.assignment[*a]).collect();
                self.call(*def, vals)
            }
            Cf::Exists { vars, hoisted, sched } => {
                let saved_taint = self.tainted;
                self.tainted = false;
                let mut value = Tri::False;
                let mut viable = true;
                for c in hoisted {
                    match self.eval(c) {
                        Tri::False => {
                            viable = false;
                            break;
                        }
                        Tri::Unknown => {
                            if self.dead {
                                viable = false;
                                value = Tri::Unknown;
                                break;
                            }
                            self.tainted = true;
                        }
                        Tri::True => {}
                    }
                }
                if viable {
                    value = self.exists_dfs(vars, sched, 0);
                }
                self.tainted = saved_taint;
                value
            }
        }
    }

    /// Searches for a witness tuple. A path where every conjunct came back
    /// `True` proves the block; a path that leans on an `Unknown` conjunct
    /// only ever justifies `Unknown`, and the search keeps looking for a
    /// clean witness past it.
    fn exists_dfs(&mut self, vars: &[usize], sched: &[Vec<Cf>], depth: usize) -> Tri {
        if self.dead {
            return Tri::Unknown;
        }
        if depth == vars.len() {
            return if self.tainted { Tri::Unknown } else { Tri::True };
        }
        let n = self.session.model.line_count() as LineId;
        let mut any_unknown = false;
        for line in 0..n {
            self.assignment[vars[depth]] = line;
            let saved_taint = self.tainted;
            let mut ok = true;
            for c in &sched[depth] {
                match self.eval(c) {
                    Tri::False => {
                        ok = false;
                        break;
                    }
                    Tri::Unknown => {
                        if self.dead {
                            self.tainted = saved_taint;
                            return Tri::Unknown;
                        }
                        self.tainted = true;
                    }
                    Tri::True => {}
                }
            }
            if ok {
                match self.exists_dfs(vars, sched, depth + 1) {
                    Tri::True => {
                        self.tainted = saved_taint;
                        return Tri::True;
                    }
                    Tri::Unknown => any_unknown = true,
                    Tri::False => {}
                }
            }
            self.tainted = saved_taint;
            if self.dead {
                return Tri::Unknown;
            }
        }
        if any_unknown {
            Tri::Unknown
        } else {
            Tri::False
        }
    }
}

/// Evaluates a bare formula under an explicit assignment of its free
/// variables. Predicate references cannot be resolved here and fail.
pub fn eval(
    formula: &Formula,
    model: &IntersectionModel,
    assignment: &[(String, LineId)],
    budget: u64,
) -> Result<EvalOutcome, FoError> {
    for v in formula.free_vars() {
        if !assignment.iter().any(|(name, _)| name == &v) {
            return Err(FoError::MissingAssignment(v));
        }
    }
    let def = Definition {
        name: "@formula".into(),
        params: assignment.iter().map(|(v, _)| v.clone()).collect(),
        body: formula.clone(),
    };
    let session = FoSession::build(model, std::slice::from_ref(&def))?;
    let args: Vec<LineId> = assignment.iter().map(|(_, l)| *l).collect();
    session.eval_def("@formula", &args, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_definition;
    use finite_geometry::{Kind, Space};
    use line_graph::IntersectionModel;
    use std::sync::OnceLock;

    fn pg32() -> &'static IntersectionModel {
        static MODEL: OnceLock<IntersectionModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            IntersectionModel::from_space(&Space::build(Kind::Projective, 3, 2).unwrap())
        })
    }

    fn session(srcs: &[&str]) -> FoSession<'static> {
        let defs: Vec<_> = srcs.iter().map(|s| parse_definition(s).unwrap()).collect();
        FoSession::build(pg32(), &defs).unwrap()
    }

    #[test]
    fn atoms_evaluate_against_the_model() {
        let s = session(&["F(a, b) := sim(a, b)", "G(a, b) := eq(a, b)"]);
        let model = pg32();
        let meets = (0..model.line_count() as LineId)
            .find(|&b| model.sim(0, b))
            .unwrap();
        assert_eq!(s.eval_def("F", &[0, meets], u64::MAX).unwrap().value, Tri::True);
        assert_eq!(s.eval_def("F", &[0, 0], u64::MAX).unwrap().value, Tri::False);
        assert_eq!(s.eval_def("G", &[0, 0], u64::MAX).unwrap().value, Tri::True);
    }

    #[test]
    fn quantifiers_search_the_whole_line_set() {
        // Every line meets some line; no line meets every line in PG(3, 2).
        let s = session(&[
            "F(a) := exists g . sim(a, g)",
            "G(a) := forall g . sim(a, g) | eq(a, g)",
        ]);
        assert_eq!(s.eval_def("F", &[7], u64::MAX).unwrap().value, Tri::True);
        assert_eq!(s.eval_def("G", &[7], u64::MAX).unwrap().value, Tri::False);
    }

    #[test]
    fn predicate_calls_resolve_and_memoise() {
        let s = session(&[
            "Meet(a, b) := sim(a, b)",
            "Connected(a, b) := exists g . Meet(a, g) & Meet(g, b)",
        ]);
        let first = s.eval_def("Connected", &[0, 34], u64::MAX).unwrap();
        assert_eq!(first.value, Tri::True);
        let again = s.eval_def("Connected", &[0, 34], u64::MAX).unwrap();
        assert_eq!(again.value, Tri::True);
        assert!(again.nodes < first.nodes);
    }

    #[test]
    fn exhausted_budgets_return_unknown_not_false() {
        let s = session(&["F(a) := forall g . exists h . sim(g, h) & sim(a, h) | eq(a, g) | sim(a, g)"]);
        let out = s.eval_def("F", &[0], 10).unwrap();
        assert_eq!(out.value, Tri::Unknown);
        assert!(out.nodes >= 10);
        assert_eq!(s.eval_def("F", &[0], u64::MAX).unwrap().value, Tri::True);
    }

    #[test]
    fn unknown_conjuncts_never_certify_a_witness() {
        // The first conjunct exhausts the budget on every candidate; the
        // search must not promote any candidate to a definite witness.
        let s = session(&["F(a) := exists h . (forall g1 . forall g2 . eq(g1, g1) | eq(g2, g2)) & sim(a, h)"]);
        let out = s.eval_def("F", &[0], 2_000).unwrap();
        assert_eq!(out.value, Tri::Unknown);
    }

    #[test]
    fn pigeonhole_bodies_compile_to_the_count_comparison() {
        // 36 variables: true iff line_count <= 35, which holds here exactly.
        let mut src = String::from("A() := forall ");
        for i in 1..=36 {
            src.push_str(&format!("g{i} "));
        }
        src.push('.');
        let mut parts = Vec::new();
        for i in 1..=36 {
            for j in (i + 1)..=36 {
                parts.push(format!("eq(g{i}, g{j})"));
            }
        }
        src.push(' ');
        src.push_str(&parts.join(" | "));
        let d = parse_definition(&src).unwrap();
        let s = FoSession::build(pg32(), std::slice::from_ref(&d)).unwrap();
        let out = s.eval_def("A", &[], u64::MAX).unwrap();
        assert_eq!(out.value, Tri::True);
        assert!(out.nodes < 10, "shortcut should not enumerate: {}", out.nodes);

        let mut literal = FoSession::build(pg32(), std::slice::from_ref(&d)).unwrap();
        literal.pigeonhole_shortcut = false;
        let out = literal.eval_def("A", &[], 50_000).unwrap();
        assert_eq!(out.value, Tri::Unknown);
    }

    #[test]
    fn a_smaller_pigeonhole_is_false_when_lines_outnumber_slots() {
        let d = parse_definition(
            "A() := forall g1 g2 g3 . eq(g1, g2) | eq(g1, g3) | eq(g2, g3)",
        )
        .unwrap();
        let s = FoSession::build(pg32(), std::slice::from_ref(&d)).unwrap();
        assert_eq!(s.eval_def("A", &[], u64::MAX).unwrap().value, Tri::False);
        let mut literal = FoSession::build(pg32(), std::slice::from_ref(&d)).unwrap();
        literal.pigeonhole_shortcut = false;
        assert_eq!(literal.eval_def("A", &[], u64::MAX).unwrap().value, Tri::False);
    }

    #[test]
    fn incomplete_pair_coverage_is_not_treated_as_pigeonhole() {
        let d = parse_definition("A() := forall g1 g2 g3 . eq(g1, g2) | eq(g2, g3)").unwrap();
        let s = FoSession::build(pg32(), std::slice::from_ref(&d)).unwrap();
        // Lines 0 and 1 differ, so instantiating g1 = 0, g2 = 1 fails both
        // disjuncts whatever g3 is; the literal loop finds that quickly.
        assert_eq!(s.eval_def("A", &[], u64::MAX).unwrap().value, Tri::False);
    }

    #[test]
    fn bare_formulas_evaluate_under_an_assignment() {
        let d = parse_definition("F(a, b) := exists g . sim(a, g) & sim(g, b)").unwrap();
        let out = eval(
            &d.body,
            pg32(),
            &[("a".into(), 0), ("b".into(), 34)],
            u64::MAX,
        )
        .unwrap();
        assert_eq!(out.value, Tri::True);
        let err = eval(&d.body, pg32(), &[("a".into(), 0)], u64::MAX).unwrap_err();
        assert!(matches!(err, FoError::MissingAssignment(v) if v == "b"));
    }

    #[test]
    fn unresolved_references_are_reported_by_name() {
        let d = parse_definition("F(a) := Ghost(a)").unwrap();
        let err = FoSession::build(pg32(), std::slice::from_ref(&d))
            .err()
            .expect("a dangling reference must not compile");
        assert!(matches!(err, FoError::UnresolvedPredRef { ref name } if name == "Ghost"));
    }

    #[test]
    fn arity_mismatches_are_rejected_at_compile_time() {
        let defs: Vec<_> = ["Meet(a, b) := sim(a, b)", "F(a) := Meet(a, a, a)"]
            .iter()
            .map(|s| parse_definition(s).unwrap())
            .collect();
        let err = FoSession::build(pg32(), &defs)
            .err()
            .expect("an arity mismatch must not compile");
        assert!(matches!(err, FoError::Arity { ref name, want: 2, got: 3 } if name == "Meet"));
    }
}

//! Concurrence: the three-line predicate `S` and its closure `S̄`.
//!
//! `S(a1,a2,a3)` holds when the three lines pairwise meet and every line
//! of the model meets some line that meets all three. On models where
//! three pairwise-meeting lines are either concurrent or sides of a
//! triangle, the covering condition separates the two configurations —
//! except in low dimension, where every line meets one of the sides of a
//! triangle anyway.
//!
//! `S̄(a,b,c)` extends `S` by the degenerate cases `c = a` and `c = b`
//! whenever `a` meets `b`; the set `{c : S̄(a,b,c)}` plays the role of a
//! pencil throughout the crossing and skewness predicates.
//!
//! Evaluation is definitive (no existential search deeper than one bitset
//! sweep), so `S` rows are safe to cache. On small models the full
//! symmetric triple table is materialized as a bit cube; larger models
//! fall back to per-pair rows memoized on demand.

use std::sync::Arc;

use line_graph::{key3, BitCube, IntersectionModel, LineId, LineSet, Tri};

use crate::{Eval, EvalResult, Result, Run};

/// Densest triple table we are willing to hold in memory.
const DENSE_CUBE_LIMIT_BYTES: usize = 64 << 20;

fn build_cube(model: &IntersectionModel) -> BitCube {
    let l = model.line_count();
    let mut cube = BitCube::new(l);
    for a in 0..l as LineId {
        let row_a = LineSet::from_words(l, model.row(a).to_vec());
        for b in (a + 1)..l as LineId {
            if !model.sim(a, b) {
                continue;
            }
            let mut cab = row_a.clone();
            cab.and_words(model.row(b));
            for c in cab.iter() {
                if c <= b {
                    continue;
                }
                let mut core = cab.clone();
                core.and_words(model.row(c));
                if core.is_empty() {
                    continue;
                }
                let covered = (0..l as LineId).all(|g| core.intersects_words(model.row(g)));
                if covered {
                    cube.set_sym(a, b, c);
                }
            }
        }
    }
    cube
}

impl<'a> Eval<'a> {
    /// The dense triple table, built once per model when it fits.
    pub(crate) fn s_cube(&self) -> Option<&BitCube> {
        if BitCube::byte_size(self.l()) > DENSE_CUBE_LIMIT_BYTES {
            return None;
        }
        Some(self.tables().s_cube.get_or_init(|| build_cube(self.model())))
    }

    /// Definitive point query for `S`. Cheap enough to run un-budgeted;
    /// callers charge per enclosing quantifier binding.
    pub(crate) fn s_query(&self, a: LineId, b: LineId, c: LineId) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        if let Some(cube) = self.s_cube() {
            return cube.get(a, b, c);
        }
        let key = key3(a, b, c);
        if let Some(v) = self.tables().s_map.get(&key) {
            return v;
        }
        let v = self.s_compute(a, b, c);
        self.tables().s_map.insert(key, v);
        v
    }

    fn s_compute(&self, a: LineId, b: LineId, c: LineId) -> bool {
        if !(self.sim(a, b) && self.sim(b, c) && self.sim(a, c)) {
            return false;
        }
        let mut core = self.cn2(a, b);
        core.and_words(self.model().row(c));
        if core.is_empty() {
            return false;
        }
        (0..self.l() as LineId).all(|g| core.intersects_words(self.model().row(g)))
    }

    /// `{c : S(a, b, c)}` for a fixed pair, as a shared bitset.
    pub(crate) fn s_row(&self, a: LineId, b: LineId) -> Arc<LineSet> {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(row) = self.tables().s_rows.get(&key) {
            return row;
        }
        let row = if !self.sim(a, b) || a == b {
            Arc::new(LineSet::empty(self.l()))
        } else if let Some(cube) = self.s_cube() {
            Arc::new(LineSet::from_words(self.l(), cube.row(a, b).to_vec()))
        } else {
            let mut out = LineSet::empty(self.l());
            for c in self.cn2(a, b).iter() {
                if self.s_query(a, b, c) {
                    out.insert(c);
                }
            }
            Arc::new(out)
        };
        self.tables().s_rows.insert(key, row.clone());
        row
    }

    /// `{c : S̄(a, b, c)}`: the `S` row plus `a` and `b` themselves when
    /// the pair meets.
    pub(crate) fn sbar_set(&self, a: LineId, b: LineId) -> Arc<LineSet> {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(set) = self.tables().sbar_sets.get(&key) {
            return set;
        }
        let set = if self.sim(a, b) {
            let mut s = (*self.s_row(a, b)).clone();
            s.insert(a);
            s.insert(b);
            Arc::new(s)
        } else {
            Arc::new(LineSet::empty(self.l()))
        };
        self.tables().sbar_sets.insert(key, set.clone());
        set
    }

    fn s_witness(&self, run: &mut Run, a: LineId, b: LineId, c: LineId) {
        // Reconstruct the verifying pair for the first universal line.
        let mut core = self.cn2(a, b);
        core.and_words(self.model().row(c));
        let g: LineId = 0;
        if let Some(h) = core.first_common_with(self.model().row(g)) {
            run.offer(|| vec![("g", g), ("h", h)]);
        }
    }

    /// Concurrence predicate `S`.
    pub fn s_def(&self, a1: LineId, a2: LineId, a3: LineId) -> Result<EvalResult> {
        self.guard_any()?;
        self.check_ids(&[a1, a2, a3])?;
        let mut run = self.run();
        run.charge(1);
        let v = self.s_query(a1, a2, a3);
        if v {
            self.s_witness(&mut run, a1, a2, a3);
        }
        Ok(self.finish(run, Tri::from_bool(v)))
    }

    /// Closure predicate `S̄`.
    pub fn sbar_def(&self, a: LineId, b: LineId, c: LineId) -> Result<EvalResult> {
        self.guard_any()?;
        self.check_ids(&[a, b, c])?;
        let mut run = self.run();
        run.charge(1);
        if self.sim(a, b) && (c == a || c == b) {
            // Degenerate branch: no existential block of its own.
            return Ok(self.finish(run, Tri::True));
        }
        let v = self.s_query(a, b, c);
        if v {
            self.s_witness(&mut run, a, b, c);
        }
        Ok(self.finish(run, Tri::from_bool(v)))
    }
}

#[cfg(test)]
mod tests {
    use crate::test_support::{eval, fixture, Fix};
    use line_graph::Tri;

    fn s(fix: &Fix, a: u16, b: u16, c: u16) -> Tri {
        eval(fix).s_def(a, b, c).unwrap().value
    }

    #[test]
    fn rejects_repeated_and_disjoint_arguments() {
        let fix = fixture("pg", 3, 2);
        assert_eq!(s(&fix, 4, 4, 9), Tri::False);
        // A non-meeting pair poisons the triple regardless of the third line.
        let (a, b) = fix.first_skew_pair();
        let c = (0..35).find(|&c| c != a && c != b).unwrap();
        assert_eq!(s(&fix, a, b, c), Tri::False);
    }

    #[test]
    fn low_dimension_accepts_triangles_and_concurrent_triples() {
        let fix = fixture("pg", 3, 2);
        let e = eval(&fix);
        let mut concurrent = 0u32;
        let mut triangle = 0u32;
        for (a, b, c) in fix.meeting_triples() {
            let got = e.s_def(a, b, c).unwrap().value;
            assert_eq!(got, Tri::True, "triple ({a},{b},{c})");
            if fix.concurrent(a, b, c) {
                concurrent += 1;
            } else {
                triangle += 1;
            }
        }
        // Both configuration classes are present and accepted.
        assert_eq!(concurrent, 105 + 420);
        assert_eq!(triangle, 420);
    }

    #[test]
    fn separates_configurations_in_dimension_four() {
        let fix = fixture("pg", 4, 2);
        let e = eval(&fix);
        for (a, b, c) in fix.meeting_triples() {
            let want = fix.concurrent(a, b, c);
            let got = e.s_def(a, b, c).unwrap().value;
            assert_eq!(got, Tri::from_bool(want), "triple ({a},{b},{c})");
        }
    }

    #[test]
    fn affine_two_point_lines_never_concur() {
        let fix = fixture("ag", 3, 2);
        let e = eval(&fix);
        for (a, b, c) in fix.meeting_triples() {
            assert_eq!(e.s_def(a, b, c).unwrap().value, Tri::False);
        }
    }

    #[test]
    fn affine_order_three_matches_non_coplanar_concurrence() {
        let fix = fixture("ag", 3, 3);
        let e = eval(&fix);
        let mut trues = 0u32;
        for (a, b, c) in fix.meeting_triples() {
            let want = fix.concurrent(a, b, c) && !fix.coplanar3(a, b, c);
            let got = e.s_def(a, b, c).unwrap().value;
            assert_eq!(got, Tri::from_bool(want), "triple ({a},{b},{c})");
            if got == Tri::True {
                trues += 1;
            }
        }
        assert_eq!(trues, 6318);
    }

    #[test]
    fn closure_set_sizes() {
        for (kind, n, q, a, b, want) in [
            ("pg", 3, 2, None, None, 11usize),
            ("pg", 4, 2, None, None, 15),
            ("ag", 3, 2, None, None, 2),
            ("ag", 3, 3, None, None, 11),
        ] {
            let fix = fixture(kind, n, q);
            let (a, b) = match (a, b) {
                (Some(a), Some(b)) => (a, b),
                _ => fix.first_meeting_pair(),
            };
            let e = eval(&fix);
            let size = (0..fix.model.line_count() as u16)
                .filter(|&c| e.sbar_def(a, b, c).unwrap().value == Tri::True)
                .count();
            assert_eq!(size, want, "{kind}({n},{q}) closure of ({a},{b})");
        }
    }

    #[test]
    fn true_results_carry_a_checkable_witness() {
        let fix = fixture("pg", 4, 2);
        let e = eval(&fix);
        let (a, b, c) = fix
            .meeting_triples()
            .into_iter()
            .find(|&(a, b, c)| fix.concurrent(a, b, c))
            .unwrap();
        let res = e.s_def(a, b, c).unwrap();
        assert_eq!(res.value, Tri::True);
        let w = res.witnesses.expect("witness for a true result");
        let h = w.iter().find(|(n, _)| *n == "h").unwrap().1;
        let g = w.iter().find(|(n, _)| *n == "g").unwrap().1;
        assert!(fix.model.sim(g, h));
        for x in [a, b, c] {
            assert!(fix.model.sim(h, x));
        }
    }
}

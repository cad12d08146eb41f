//! Crossing: the four-line predicate `#` on two meeting pairs, and the
//! line inequality defined from it.
//!
//! `a1 b1 # a2 b2` requires both pairs to meet and, for every line `g`,
//! either a transversal witness — a pair `h1, h2` from the closures of the
//! two pairs, concurrent with `g` — or `g` itself lying in one of the two
//! closures. In high enough dimension this captures "the two pairs meet in
//! different points"; the evaluator computes the literal formula and lets
//! each model decide.
//!
//! `neq(a, b)` holds when some line `g` crosses with itself over the two,
//! i.e. `a g # b g`.

use line_graph::{key_pairs, LineId, LineSet, Tri};

use crate::{Eval, EvalResult, Result, Run};

impl<'a> Eval<'a> {
    /// Budgeted sub-evaluation of the crossing predicate.
    pub(crate) fn hash_sub(
        &self,
        run: &mut Run,
        a1: LineId,
        b1: LineId,
        a2: LineId,
        b2: LineId,
    ) -> Tri {
        run.enter();
        let v = self.hash_value(run, a1, b1, a2, b2);
        run.leave();
        v
    }

    pub(crate) fn hash_value(
        &self,
        run: &mut Run,
        a1: LineId,
        b1: LineId,
        a2: LineId,
        b2: LineId,
    ) -> Tri {
        let key = key_pairs(a1, b1, a2, b2);
        if let Some(v) = self.tables().hash.get(&key) {
            run.charge(1);
            return Tri::from_bool(v);
        }
        if !run.charge(1) {
            return Tri::Unknown;
        }
        // Both pairs must meet; this conjunct sits outside the disjunction.
        if !(self.sim(a1, b1) && self.sim(a2, b2)) {
            self.tables().hash.insert(key, false);
            return Tri::False;
        }
        let e1 = self.sbar_set(a1, b1);
        let e2 = self.sbar_set(a2, b2);
        let mut triv = (*e1).clone();
        triv.or_assign(&e2);

        // The dense-table union path is exact and far cheaper than per-line
        // provider traffic, so suggestions only matter where the table does
        // not fit.
        let v = if self.s_cube().is_some() {
            self.hash_by_union(run, &e1, &e2, triv.clone())
        } else if self.guided().is_some() {
            self.hash_guided(run, [a1, b1, a2, b2], &e1, &e2, &triv)
        } else {
            self.hash_by_scan(run, &e1, &e2, &triv)
        };
        if v.is_definite() {
            self.tables().hash.insert(key, v.is_true());
        }
        if v.is_true() {
            self.hash_witness(run, &e1, &e2, &triv);
        }
        v
    }

    /// Accumulate the union of `S`-rows over closure pairs until it covers
    /// the universe (or provably cannot).
    fn hash_by_union(&self, run: &mut Run, e1: &LineSet, e2: &LineSet, mut acc: LineSet) -> Tri {
        let cube = self.s_cube().expect("dense table present on this path");
        let mut since_check = 0u32;
        for h1 in e1.iter() {
            for h2 in e2.iter() {
                if h1 == h2 || !self.sim(h1, h2) {
                    continue;
                }
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                acc.or_words(cube.row(h1, h2));
                since_check += 1;
                if since_check >= 8 {
                    since_check = 0;
                    if acc.is_full() {
                        return Tri::True;
                    }
                }
            }
        }
        Tri::from_bool(acc.is_full())
    }

    /// Check each universal line in turn; fast to refute.
    fn hash_by_scan(&self, run: &mut Run, e1: &LineSet, e2: &LineSet, triv: &LineSet) -> Tri {
        for g in 0..self.l() as LineId {
            if triv.contains(g) {
                continue;
            }
            if !run.charge(1) {
                return Tri::Unknown;
            }
            let found = e1
                .iter()
                .any(|h1| e2.iter().any(|h2| self.s_query(h1, h2, g)));
            if !found {
                return Tri::False;
            }
        }
        Tri::True
    }

    fn hash_guided(
        &self,
        run: &mut Run,
        pairs: [LineId; 4],
        e1: &LineSet,
        e2: &LineSet,
        triv: &LineSet,
    ) -> Tri {
        let provider = self.guided().expect("guided mode");
        for g in 0..self.l() as LineId {
            if triv.contains(g) {
                continue;
            }
            if !run.charge(1) {
                return Tri::Unknown;
            }
            let verified = provider
                .hash_pair(pairs, g)
                .map(|(h1, h2)| e1.contains(h1) && e2.contains(h2) && self.s_query(h1, h2, g))
                .unwrap_or(false);
            if verified {
                continue;
            }
            if !self.falls_back() {
                return Tri::Unknown;
            }
            let found = e1
                .iter()
                .any(|h1| e2.iter().any(|h2| self.s_query(h1, h2, g)));
            if !found {
                return Tri::False;
            }
        }
        Tri::True
    }

    /// Bindings for the first universal line outside the trivial branch.
    fn hash_witness(&self, run: &mut Run, e1: &LineSet, e2: &LineSet, triv: &LineSet) {
        let l = self.l() as LineId;
        let Some(g) = (0..l).find(|&g| !triv.contains(g)) else {
            run.offer(|| vec![("g", 0)]);
            return;
        };
        for h1 in e1.iter() {
            for h2 in e2.iter() {
                if self.s_query(h1, h2, g) {
                    run.offer(|| vec![("g", g), ("h1", h1), ("h2", h2)]);
                    return;
                }
            }
        }
    }

    /// Crossing predicate `#` on the meeting pairs `(a1, b1)`, `(a2, b2)`.
    pub fn hash_def(&self, a1: LineId, b1: LineId, a2: LineId, b2: LineId) -> Result<EvalResult> {
        self.guard_any()?;
        self.check_ids(&[a1, b1, a2, b2])?;
        let mut run = self.run();
        let v = self.hash_value(&mut run, a1, b1, a2, b2);
        Ok(self.finish(run, v))
    }

    pub(crate) fn neq_sub(&self, run: &mut Run, a: LineId, b: LineId) -> Tri {
        run.enter();
        let v = self.neq_value(run, a, b);
        run.leave();
        v
    }

    pub(crate) fn neq_value(&self, run: &mut Run, a: LineId, b: LineId) -> Tri {
        // g must meet both arguments for either crossing pair to meet.
        let mut unknown = false;
        for g in self.cn2(a, b).iter() {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            match self.hash_sub(run, a, g, b, g) {
                Tri::True => {
                    run.offer(|| vec![("g", g)]);
                    return Tri::True;
                }
                Tri::Unknown => unknown = true,
                Tri::False => {}
            }
        }
        if unknown || run.spent() {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    /// Line inequality defined through self-crossing.
    pub fn neq_def(&self, a: LineId, b: LineId) -> Result<EvalResult> {
        self.guard_any()?;
        self.check_ids(&[a, b])?;
        let mut run = self.run();
        let v = self.neq_value(&mut run, a, b);
        Ok(self.finish(run, v))
    }
}

//! Carrier triples and their congruences in projective 3-space.
//!
//! A triple of pairwise-meeting lines either passes through one point
//! (spanning space — a tripod) or bounds a plane figure (a trilateral).
//! `t_def` accepts exactly the two spanning configurations; the three
//! congruences compare what the carriers of two such triples can share:
//!
//! * `equiv_plus` — the triples are of the same kind;
//! * `equiv_minus` — mixed kinds;
//! * `equiv_oplus` — same kind on *distinct* carriers, witnessed through a
//!   connecting triple; unlike the others it is not symmetric in form.
//!
//! All four are literal quantifier evaluations over the line universe,
//! with candidate sets pruned by the visible adjacency constraints.

use line_graph::{key3, key_triples_ordered, key_triples_sym, LineId, LineSet, Tri};

use crate::{Eval, EvalResult, Result, Run, Transcript};

impl<'a> Eval<'a> {
    /// `x` meets or equals every member of `t`, intersected with `extra`.
    fn simeq_all(&self, t: [LineId; 3], extra: Option<&LineSet>) -> LineSet {
        let mut s = self.simeq_set(t[0]);
        s.and_assign(&self.simeq_set(t[1]));
        s.and_assign(&self.simeq_set(t[2]));
        if let Some(e) = extra {
            s.and_assign(e);
        }
        s
    }

    pub(crate) fn t_sub(&self, run: &mut Run, t: [LineId; 3]) -> Tri {
        run.enter();
        let v = self.t_value(run, t);
        run.leave();
        v
    }

    pub(crate) fn t_value(&self, run: &mut Run, t: [LineId; 3]) -> Tri {
        let key = key3(t[0], t[1], t[2]);
        if let Some(v) = self.tables().t3.get(&key) {
            run.charge(1);
            return Tri::from_bool(v);
        }
        if !run.charge(1) {
            return Tri::Unknown;
        }
        let [a1, a2, a3] = t;
        // Pairwise meeting is hoisted; it also forces distinctness.
        if !(self.sim(a1, a2) && self.sim(a2, a3) && self.sim(a1, a3)) {
            self.tables().t3.insert(key, false);
            return Tri::False;
        }
        let s1 = self.simeq_set(a1);
        let s2 = self.simeq_set(a2);
        let s3 = self.simeq_set(a3);
        let mut pre1 = s1.clone();
        pre1.and_assign(&s2);
        let mut pre2 = s2.clone();
        pre2.and_assign(&s3);
        let mut pre3 = s3;
        pre3.and_assign(&s1);

        let guided = self.guided();
        let pure_guided = guided.is_some() && !self.falls_back();
        let l = self.l() as LineId;
        for g1 in 0..l {
            for g2 in g1..l {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                if let Some(p) = guided {
                    let ok = p
                        .carrier_triple(t, g1, g2)
                        .map(|xs| self.verify_carrier_triple(t, g1, g2, xs))
                        .unwrap_or(false);
                    if ok {
                        continue;
                    }
                    if pure_guided {
                        return Tri::Unknown;
                    }
                }
                let mut nn = self.nbrs(g1);
                nn.and_words(self.model().row(g2));
                let mut k1 = pre1.clone();
                k1.and_assign(&nn);
                if k1.is_empty() {
                    self.tables().t3.insert(key, false);
                    return Tri::False;
                }
                let mut k2 = pre2.clone();
                k2.and_assign(&nn);
                if k2.is_empty() {
                    self.tables().t3.insert(key, false);
                    return Tri::False;
                }
                let mut k3 = pre3.clone();
                k3.and_assign(&nn);
                if k3.is_empty() {
                    self.tables().t3.insert(key, false);
                    return Tri::False;
                }
                // The x's must not all coincide.
                if k1.len() == 1 && k1 == k2 && k2 == k3 {
                    self.tables().t3.insert(key, false);
                    return Tri::False;
                }
            }
        }
        self.tables().t3.insert(key, true);
        self.t_witness(run, pre1, pre2, pre3);
        Tri::True
    }

    fn verify_carrier_triple(&self, t: [LineId; 3], g1: LineId, g2: LineId, xs: [LineId; 3]) -> bool {
        let l = self.l() as LineId;
        if xs.iter().any(|&x| x >= l) {
            return false;
        }
        let simeq = |x: LineId, y: LineId| x == y || self.sim(x, y);
        for (i, &x) in xs.iter().enumerate() {
            if !(self.sim(x, g1) && self.sim(x, g2)) {
                return false;
            }
            if !(simeq(x, t[i]) && simeq(x, t[(i + 1) % 3])) {
                return false;
            }
        }
        xs[0] != xs[1] || xs[1] != xs[2]
    }

    /// Courtesy witness for the first universal pair `(0, 0)`.
    fn t_witness(&self, run: &mut Run, pre1: LineSet, pre2: LineSet, pre3: LineSet) {
        let nn = self.nbrs(0);
        let mut k1 = pre1;
        k1.and_assign(&nn);
        let mut k2 = pre2;
        k2.and_assign(&nn);
        let mut k3 = pre3;
        k3.and_assign(&nn);
        let Some(x1) = k1.first() else { return };
        let x2 = k2.iter().find(|&x| x != x1).or_else(|| k2.first());
        let Some(x2) = x2 else { return };
        let x3 = if x1 == x2 {
            k3.iter().find(|&x| x != x1).or_else(|| k3.first())
        } else {
            k3.first()
        };
        let Some(x3) = x3 else { return };
        if x1 == x2 && x2 == x3 {
            return;
        }
        run.offer(|| vec![("g1", 0), ("g2", 0), ("x1", x1), ("x2", x2), ("x3", x3)]);
    }

    /// Matching of three distinct section lines per row, adjacent across
    /// rows; optionally records the assignment found.
    fn match3(
        &self,
        run: &mut Run,
        ks1: &[LineId],
        ks2: &[LineId],
        record: Option<&mut ([LineId; 3], [LineId; 3])>,
    ) -> Option<bool> {
        if ks1.len() < 3 || ks2.len() < 3 {
            return Some(false);
        }
        fn dfs(
            e: &Eval<'_>,
            run: &mut Run,
            ks1: &[LineId],
            ks2: &[LineId],
            j: usize,
            used1: u64,
            used2: u64,
            asn: &mut ([LineId; 3], [LineId; 3]),
        ) -> Option<bool> {
            if j == 3 {
                return Some(true);
            }
            for (i1, &u) in ks1.iter().enumerate() {
                if used1 & (1 << i1) != 0 {
                    continue;
                }
                for (i2, &v) in ks2.iter().enumerate() {
                    if used2 & (1 << i2) != 0 {
                        continue;
                    }
                    if !run.charge(1) {
                        return None;
                    }
                    if u != v && !e.sim(u, v) {
                        continue;
                    }
                    asn.0[j] = u;
                    asn.1[j] = v;
                    match dfs(e, run, ks1, ks2, j + 1, used1 | 1 << i1, used2 | 1 << i2, asn) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => return None,
                    }
                }
            }
            Some(false)
        }
        let mut asn = ([0; 3], [0; 3]);
        let found = dfs(self, run, ks1, ks2, 0, 0, 0, &mut asn)?;
        if found {
            if let Some(slot) = record {
                *slot = asn;
            }
        }
        Some(found)
    }

    pub(crate) fn eqp_sub(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        run.enter();
        let v = self.eqp_value(run, t1, t2);
        run.leave();
        v
    }

    pub(crate) fn eqp_value(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        let key = key_triples_sym(t1, t2);
        if let Some(v) = self.tables().equiv_plus.get(&key) {
            run.charge(1);
            return Tri::from_bool(v);
        }
        match (self.t_sub(run, t1), self.t_sub(run, t2)) {
            (Tri::True, Tri::True) => {}
            (Tri::Unknown, _) | (_, Tri::Unknown) => return Tri::Unknown,
            _ => {
                self.tables().equiv_plus.insert(key, false);
                return Tri::False;
            }
        }
        let x1pre = self.simeq_all(t1, None);
        let x2pre = self.simeq_all(t2, None);
        let guided = self.guided();
        let pure_guided = guided.is_some() && !self.falls_back();
        let mut witness: Option<Transcript> = None;
        for g in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            if let Some(p) = guided {
                let ok = p
                    .equiv_plus_rows(t1, t2, g)
                    .map(|rows| self.verify_eqp_rows(&x1pre, &x2pre, g, rows))
                    .unwrap_or(false);
                if ok {
                    continue;
                }
                if pure_guided {
                    return Tri::Unknown;
                }
            }
            let sg = self.simeq_set(g);
            let mut k1 = x1pre.clone();
            k1.and_assign(&sg);
            let mut k2 = x2pre.clone();
            k2.and_assign(&sg);
            let ks1: Vec<LineId> = k1.iter().collect();
            let ks2: Vec<LineId> = k2.iter().collect();
            let mut asn = ([0; 3], [0; 3]);
            match self.match3(run, &ks1, &ks2, Some(&mut asn)) {
                None => return Tri::Unknown,
                Some(false) => {
                    self.tables().equiv_plus.insert(key, false);
                    return Tri::False;
                }
                Some(true) => {
                    if g == 0 && witness.is_none() {
                        witness = Some(vec![
                            ("g", 0),
                            ("x11", asn.0[0]),
                            ("x12", asn.0[1]),
                            ("x13", asn.0[2]),
                            ("x21", asn.1[0]),
                            ("x22", asn.1[1]),
                            ("x23", asn.1[2]),
                        ]);
                    }
                }
            }
        }
        self.tables().equiv_plus.insert(key, true);
        if let Some(w) = witness {
            run.offer(|| w);
        }
        Tri::True
    }

    fn verify_eqp_rows(
        &self,
        x1pre: &LineSet,
        x2pre: &LineSet,
        g: LineId,
        rows: [[LineId; 3]; 2],
    ) -> bool {
        let l = self.l() as LineId;
        let simeq = |x: LineId, y: LineId| x == y || self.sim(x, y);
        let [r1, r2] = rows;
        for row in [&r1, &r2] {
            if row.iter().any(|&x| x >= l) {
                return false;
            }
            if row[0] == row[1] || row[1] == row[2] || row[0] == row[2] {
                return false;
            }
        }
        r1.iter().all(|&x| x1pre.contains(x) && simeq(x, g))
            && r2.iter().all(|&x| x2pre.contains(x) && simeq(x, g))
            && (0..3).all(|j| simeq(r1[j], r2[j]))
    }

    pub(crate) fn eqm_sub(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        run.enter();
        let v = self.eqm_value(run, t1, t2);
        run.leave();
        v
    }

    pub(crate) fn eqm_value(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        let key = key_triples_sym(t1, t2);
        if let Some(v) = self.tables().equiv_minus.get(&key) {
            run.charge(1);
            return Tri::from_bool(v);
        }
        match (self.t_sub(run, t1), self.t_sub(run, t2)) {
            (Tri::True, Tri::True) => {}
            (Tri::Unknown, _) | (_, Tri::Unknown) => return Tri::Unknown,
            _ => {
                self.tables().equiv_minus.insert(key, false);
                return Tri::False;
            }
        }
        let x1s: Vec<LineId> = self.simeq_all(t1, None).iter().collect();
        let x2s: Vec<LineId> = self.simeq_all(t2, None).iter().collect();
        let guided = self.guided();
        let pure_guided = guided.is_some() && !self.falls_back();
        let mut witness: Option<Transcript> = None;
        for g in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            if let Some(p) = guided {
                let ok = p
                    .equiv_minus_pair(t1, t2, g)
                    .map(|(x1, x2)| {
                        self.verify_eqm_pair(run, t1, t2, &x1s, &x2s, g, x1, x2)
                    })
                    .unwrap_or(false);
                if ok {
                    continue;
                }
                if pure_guided {
                    return Tri::Unknown;
                }
            }
            let mut found = false;
            let mut saw_unknown = false;
            'outer: for &x1 in &x1s {
                for &x2 in &x2s {
                    if !run.charge(1) {
                        return Tri::Unknown;
                    }
                    if g == x1 || g == x2 {
                        found = true;
                    } else {
                        match self.eqp_sub(run, t1, [g, x1, x2]) {
                            Tri::True => found = true,
                            Tri::Unknown => saw_unknown = true,
                            Tri::False => match self.eqp_sub(run, t2, [g, x1, x2]) {
                                Tri::True => found = true,
                                Tri::Unknown => saw_unknown = true,
                                Tri::False => {}
                            },
                        }
                    }
                    if found {
                        if g == 0 && witness.is_none() {
                            witness = Some(vec![("g", 0), ("x1", x1), ("x2", x2)]);
                        }
                        break 'outer;
                    }
                }
            }
            if !found {
                if saw_unknown {
                    return Tri::Unknown;
                }
                self.tables().equiv_minus.insert(key, false);
                return Tri::False;
            }
        }
        self.tables().equiv_minus.insert(key, true);
        if let Some(w) = witness {
            run.offer(|| w);
        }
        Tri::True
    }

    #[allow(clippy::too_many_arguments)]
    fn verify_eqm_pair(
        &self,
        run: &mut Run,
        t1: [LineId; 3],
        t2: [LineId; 3],
        x1s: &[LineId],
        x2s: &[LineId],
        g: LineId,
        x1: LineId,
        x2: LineId,
    ) -> bool {
        if !(x1s.contains(&x1) && x2s.contains(&x2)) {
            return false;
        }
        g == x1
            || g == x2
            || self.eqp_sub(run, t1, [g, x1, x2]).is_true()
            || self.eqp_sub(run, t2, [g, x1, x2]).is_true()
    }

    pub(crate) fn eqo_sub(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        run.enter();
        let v = self.eqo_value(run, t1, t2);
        run.leave();
        v
    }

    pub(crate) fn eqo_value(&self, run: &mut Run, t1: [LineId; 3], t2: [LineId; 3]) -> Tri {
        let key = key_triples_ordered(t1, t2);
        if let Some(v) = self.tables().equiv_oplus.get(&key) {
            run.charge(1);
            return Tri::from_bool(v);
        }
        match self.eqp_sub(run, t1, t2) {
            Tri::True => {}
            Tri::Unknown => return Tri::Unknown,
            Tri::False => {
                self.tables().equiv_oplus.insert(key, false);
                return Tri::False;
            }
        }
        if let Some(p) = self.guided() {
            if let Some([x1, x2, x3]) = p.oplus_triple(t1, t2) {
                if self.verify_oplus(run, t1, t2, x1, x2, x3) {
                    self.tables().equiv_oplus.insert(key, true);
                    run.offer(|| vec![("x1", x1), ("x2", x2), ("x3", x3)]);
                    return Tri::True;
                }
            }
            if !self.falls_back() {
                return Tri::Unknown;
            }
        }
        // Strict-adjacency candidate sets for the connecting triple.
        let m1 = self.strict_all(t1, None);
        let m2 = self.strict_all(t2, None);
        let mut m3 = self.strict_all(t1, None);
        m3.and_assign(&self.strict_all(t2, None));
        let mut saw_unknown = false;
        for x3 in m3.iter() {
            for x1 in m1.iter() {
                for x2 in m2.iter() {
                    if !run.charge(1) {
                        return Tri::Unknown;
                    }
                    match self.eqm_sub(run, t1, [x1, x2, x3]) {
                        Tri::True => {
                            self.tables().equiv_oplus.insert(key, true);
                            run.offer(|| vec![("x1", x1), ("x2", x2), ("x3", x3)]);
                            return Tri::True;
                        }
                        Tri::Unknown => saw_unknown = true,
                        Tri::False => {}
                    }
                }
            }
        }
        if saw_unknown || run.spent() {
            return Tri::Unknown;
        }
        self.tables().equiv_oplus.insert(key, false);
        Tri::False
    }

    fn verify_oplus(
        &self,
        run: &mut Run,
        t1: [LineId; 3],
        t2: [LineId; 3],
        x1: LineId,
        x2: LineId,
        x3: LineId,
    ) -> bool {
        let l = self.l() as LineId;
        if x1 >= l || x2 >= l || x3 >= l {
            return false;
        }
        let strict = |x: LineId, t: [LineId; 3]| t.iter().all(|&v| self.sim(x, v));
        strict(x1, t1)
            && strict(x2, t2)
            && strict(x3, t1)
            && strict(x3, t2)
            && self.eqm_sub(run, t1, [x1, x2, x3]).is_true()
    }

    /// `x` strictly meets every member of `t`.
    fn strict_all(&self, t: [LineId; 3], extra: Option<&LineSet>) -> LineSet {
        let mut s = self.nbrs(t[0]);
        s.and_words(self.model().row(t[1]));
        s.and_words(self.model().row(t[2]));
        if let Some(e) = extra {
            s.and_assign(e);
        }
        s
    }

    /// Carrier-triple predicate: tripods and trilaterals.
    pub fn t_def(&self, a1: LineId, a2: LineId, a3: LineId) -> Result<EvalResult> {
        self.guard_projective_exact(3)?;
        self.check_ids(&[a1, a2, a3])?;
        let mut run = self.run();
        let v = self.t_value(&mut run, [a1, a2, a3]);
        Ok(self.finish(run, v))
    }

    /// Same-kind carrier congruence.
    pub fn equiv_plus(&self, t1: [LineId; 3], t2: [LineId; 3]) -> Result<EvalResult> {
        self.guard_projective_exact(3)?;
        self.check_ids(&t1)?;
        self.check_ids(&t2)?;
        let mut run = self.run();
        let v = self.eqp_value(&mut run, t1, t2);
        Ok(self.finish(run, v))
    }

    /// Mixed-kind carrier congruence.
    pub fn equiv_minus(&self, t1: [LineId; 3], t2: [LineId; 3]) -> Result<EvalResult> {
        self.guard_projective_exact(3)?;
        self.check_ids(&t1)?;
        self.check_ids(&t2)?;
        let mut run = self.run();
        let v = self.eqm_value(&mut run, t1, t2);
        Ok(self.finish(run, v))
    }

    /// Same-kind congruence on distinct carriers.
    pub fn equiv_oplus(&self, t1: [LineId; 3], t2: [LineId; 3]) -> Result<EvalResult> {
        self.guard_projective_exact(3)?;
        self.check_ids(&t1)?;
        self.check_ids(&t2)?;
        let mut run = self.run();
        let v = self.eqo_value(&mut run, t1, t2);
        Ok(self.finish(run, v))
    }
}

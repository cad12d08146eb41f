//! Affine non-intersection: the case split, reachability, and the two
//! dimension-parity definitions.
//!
//! Affine models of the same dimension come in two flavors the language
//! must tell apart without coordinates: `alpha` (few lines — the binary
//! case) and `beta` (a large pairwise-meeting family exists — every other
//! order). The binary case gets the direct definition `gamma`; the rest go
//! through stepwise reachability (`m_def` / `mq_def`) toward the parity
//! split `delta0` / `delta1`, and `notsim_affine` dispatches per the
//! top-level disjunction.

use line_graph::{LineId, LineSet, Tri};

use crate::{chain_name, Eval, EvalResult, PredicateError, Result, Run};

impl<'a> Eval<'a> {
    // ---- case split -----------------------------------------------------

    /// Few-lines test: the line count stays within the binary bound.
    pub fn alpha_def(&self) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        let mut run = self.run();
        run.charge(1);
        let v = self.alpha_value();
        Ok(self.finish(run, Tri::from_bool(v)))
    }

    pub(crate) fn alpha_value(&self) -> bool {
        self.l() as u64 <= self.model().params().k
    }

    /// Large-family test: 2ⁿ pairwise-meeting lines exist.
    pub fn beta_def(&self) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        let mut run = self.run();
        let v = self.beta_value(&mut run);
        Ok(self.finish(run, v))
    }

    pub(crate) fn beta_sub(&self, run: &mut Run, witness_slot: &mut Option<Vec<LineId>>) -> Tri {
        run.enter();
        let v = self.beta_inner(run, witness_slot);
        run.leave();
        v
    }

    fn beta_value(&self, run: &mut Run) -> Tri {
        let mut clique = None;
        let v = self.beta_inner(run, &mut clique);
        if v.is_true() {
            if let Some(ids) = clique {
                run.offer(|| {
                    ids.iter()
                        .enumerate()
                        .map(|(i, &x)| (chain_name("x", i + 1), x))
                        .collect()
                });
            } else {
                run.offer(Vec::new);
            }
        }
        v
    }

    fn beta_inner(&self, run: &mut Run, witness_slot: &mut Option<Vec<LineId>>) -> Tri {
        let need = 1usize << self.model().params().n;
        if let Some((v, ids)) = self.tables().clique_fact.get() {
            run.charge(1);
            if *v {
                *witness_slot = Some(ids.clone());
            }
            return Tri::from_bool(*v);
        }
        // A full pencil is the natural witness; check one cheaply first.
        if let Some(ids) = self.pencil_witness(run, need) {
            let _ = self.tables().clique_fact.set((true, ids.clone()));
            *witness_slot = Some(ids);
            return Tri::True;
        }
        let (v, ids) = self.clique_search(run, need);
        if v.is_definite() {
            let _ = self
                .tables()
                .clique_fact
                .set((v.is_true(), ids.clone().unwrap_or_default()));
        }
        *witness_slot = ids;
        v
    }

    /// Try the largest common-neighborhood family through one line.
    fn pencil_witness(&self, run: &mut Run, need: usize) -> Option<Vec<LineId>> {
        for seed in 0..self.l() as LineId {
            if !run.charge(1) {
                return None;
            }
            let mut ids = vec![seed];
            let mut cands = self.nbrs(seed);
            while let Some(next) = cands.first() {
                ids.push(next);
                cands.and_words(self.model().row(next));
                if ids.len() >= need {
                    return Some(ids);
                }
            }
        }
        None
    }

    /// Exact branch-and-bound decision for a pairwise-meeting family of
    /// the requested size. Usable on any model.
    pub fn clique_at_least(&self, need: usize) -> EvalResult {
        let mut run = self.run();
        if need == 0 {
            run.offer(Vec::new);
            return self.finish(run, Tri::True);
        }
        let (v, ids) = self.clique_search(&mut run, need);
        if v.is_true() {
            if let Some(ids) = ids {
                run.offer(|| {
                    ids.iter()
                        .enumerate()
                        .map(|(i, &x)| (chain_name("x", i + 1), x))
                        .collect()
                });
            }
        }
        self.finish(run, v)
    }

    fn clique_search(&self, run: &mut Run, need: usize) -> (Tri, Option<Vec<LineId>>) {
        let l = self.l() as LineId;
        if need > l as usize {
            return (Tri::False, None);
        }
        // Degree-descending order dives into dense neighborhoods first.
        let mut order: Vec<LineId> = (0..l).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.model().degree(v)));
        let mut cur: Vec<LineId> = Vec::with_capacity(need);
        let mut found: Option<Vec<LineId>> = None;
        let v = self.clique_dfs(run, &order, &mut cur, need, &mut found);
        (v, found)
    }

    fn clique_dfs(
        &self,
        run: &mut Run,
        cands: &[LineId],
        cur: &mut Vec<LineId>,
        need: usize,
        found: &mut Option<Vec<LineId>>,
    ) -> Tri {
        if cur.len() >= need {
            *found = Some(cur.clone());
            return Tri::True;
        }
        let mut unknown = false;
        for (i, &v) in cands.iter().enumerate() {
            if cur.len() + (cands.len() - i) < need {
                break;
            }
            if !run.charge(1) {
                return Tri::Unknown;
            }
            let rest: Vec<LineId> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&u| self.sim(v, u))
                .collect();
            if cur.len() + 1 + rest.len() < need {
                continue;
            }
            cur.push(v);
            match self.clique_dfs(run, &rest, cur, need, found) {
                Tri::True => {
                    cur.pop();
                    return Tri::True;
                }
                Tri::Unknown => unknown = true,
                Tri::False => {}
            }
            cur.pop();
        }
        if unknown {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    // ---- the binary-case definition ------------------------------------

    pub(crate) fn gamma_value(&self, run: &mut Run, a1: LineId, a2: LineId) -> Tri {
        if a1 == a2 {
            return Tri::True;
        }
        run.charge(1);
        if !self.alpha_value() {
            return Tri::False;
        }
        // Both crossing conjuncts need the b's to meet both arguments.
        let cands: Vec<LineId> = self.cn2(a1, a2).iter().collect();
        let mut unknown = false;
        let mut firsts: Vec<LineId> = Vec::new();
        for &b1 in &cands {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            match self.hash_sub(run, a1, b1, a2, b1) {
                Tri::True => firsts.push(b1),
                Tri::Unknown => unknown = true,
                Tri::False => {}
            }
        }
        for &b1 in &firsts {
            for &b2 in &firsts {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                match self.neq_sub(run, b1, b2) {
                    Tri::True => {
                        run.offer(|| vec![("b1", b1), ("b2", b2)]);
                        return Tri::True;
                    }
                    Tri::Unknown => unknown = true,
                    Tri::False => {}
                }
            }
        }
        if unknown || run.spent() {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    /// Non-intersection for the binary case.
    pub fn gamma_def(&self, a1: LineId, a2: LineId) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        self.check_ids(&[a1, a2])?;
        let mut run = self.run();
        let v = self.gamma_value(&mut run, a1, a2);
        Ok(self.finish(run, v))
    }

    // ---- coplanarity ----------------------------------------------------

    pub(crate) fn pi_sub(&self, run: &mut Run, a: LineId, b: LineId) -> Tri {
        run.enter();
        let v = self.pi_value(run, a, b);
        run.leave();
        v
    }

    pub(crate) fn pi_value(&self, run: &mut Run, a: LineId, b: LineId) -> Tri {
        // c completes concurrent triples with both arguments, d with a,
        // e with b; the cross conditions bind the figure together.
        for c in self.cn2(a, b).iter() {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            let mut dset = (*self.s_row(a, c)).clone();
            dset.and_words(self.model().row(b));
            for d in dset.iter() {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                let mut eset = (*self.s_row(b, c)).clone();
                eset.and_words(self.model().row(a));
                eset.and_words(self.model().row(d));
                if let Some(e) = eset.first() {
                    run.offer(|| vec![("c", c), ("d", d), ("e", e)]);
                    return Tri::True;
                }
            }
        }
        if run.spent() {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    /// Coplanarity of two lines (orders with at least three points per
    /// line).
    pub fn pi_def(&self, a: LineId, b: LineId) -> Result<EvalResult> {
        self.guard_affine(3, None)?;
        self.check_ids(&[a, b])?;
        let mut run = self.run();
        let v = self.pi_value(&mut run, a, b);
        Ok(self.finish(run, v))
    }

    // ---- stepwise reachability ------------------------------------------

    /// Quantifier-free reachability step over an arbitrary prefix.
    pub(crate) fn m_over(&self, run: &mut Run, list: &[LineId], x: LineId) -> Tri {
        if list.contains(&x) {
            return Tri::True;
        }
        let mut unknown = false;
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                match self.hash_sub(run, list[i], x, list[j], x) {
                    Tri::True => return Tri::True,
                    Tri::Unknown => unknown = true,
                    Tri::False => {}
                }
            }
        }
        if unknown {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    fn check_base_len(&self, name: &'static str, list: &[LineId]) -> Result<()> {
        let m = self.model().params().m as usize;
        if list.len() == m {
            Ok(())
        } else {
            Err(PredicateError::WrongDimension {
                need: format!("`{name}` takes m = {m} base lines on this model"),
                got: format!("{} base lines", list.len()),
            })
        }
    }

    /// Single reachability step from the base list.
    pub fn m_def(&self, a_list: &[LineId], x: LineId) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        self.check_base_len("m", a_list)?;
        self.check_ids(a_list)?;
        self.check_ids(&[x])?;
        let mut run = self.run();
        let v = self.m_over(&mut run, a_list, x);
        Ok(self.finish(run, v))
    }

    /// Everything reachable from `list` by repeated steps — a superset of
    /// what any bounded chain can visit, so membership failure refutes.
    fn m_closure(&self, run: &mut Run, list: &[LineId]) -> Option<LineSet> {
        let mut cur = LineSet::from_ids(self.l(), list.iter().copied());
        let mut members: Vec<LineId> = list.to_vec();
        loop {
            let mut grew = false;
            for y in 0..self.l() as LineId {
                if cur.contains(y) {
                    continue;
                }
                if !run.charge(1) {
                    return None;
                }
                if self.m_over(run, &members, y) == Tri::True {
                    cur.insert(y);
                    members.push(y);
                    grew = true;
                }
            }
            if !grew {
                return Some(cur);
            }
        }
    }

    pub(crate) fn mq_sub(&self, run: &mut Run, a_list: &[LineId], steps: usize, x: LineId) -> Tri {
        run.enter();
        let v = self.mq_value(run, a_list, steps, x);
        run.leave();
        v
    }

    pub(crate) fn mq_value(&self, run: &mut Run, a_list: &[LineId], steps: usize, x: LineId) -> Tri {
        if steps == 0 {
            return self.m_over(run, a_list, x);
        }
        if let Some(p) = self.guided() {
            if let Some(chain) = p.mr_chain(a_list, x, steps) {
                if let Some(v) = self.verify_mq_chain(run, a_list, steps, x, chain) {
                    return v;
                }
            }
            if !self.falls_back() {
                return Tri::Unknown;
            }
        }
        let Some(closure) = self.m_closure(run, a_list) else {
            return Tri::Unknown;
        };
        // Chain elements and the target all live inside the closure.
        if !closure.contains(x) {
            return Tri::False;
        }
        let members: Vec<LineId> = closure.iter().collect();
        let mut prefix = a_list.to_vec();
        let mut found = None;
        let v = self.mq_dfs(run, &mut prefix, a_list.len(), &members, steps, x, &mut found);
        if v == Tri::True {
            if let Some(chain) = found {
                run.offer(|| {
                    chain
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| (chain_name("b", i + 1), b))
                        .collect()
                });
            }
        }
        v
    }

    #[allow(clippy::too_many_arguments)]
    fn mq_dfs(
        &self,
        run: &mut Run,
        prefix: &mut Vec<LineId>,
        base_len: usize,
        members: &[LineId],
        remaining: usize,
        x: LineId,
        found: &mut Option<Vec<LineId>>,
    ) -> Tri {
        if remaining == 0 {
            let v = self.m_over(run, prefix, x);
            if v == Tri::True {
                *found = Some(prefix[base_len..].to_vec());
            }
            return v;
        }
        let mut unknown = false;
        for &y in members {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            match self.m_over(run, prefix, y) {
                Tri::True => {}
                Tri::Unknown => {
                    unknown = true;
                    continue;
                }
                Tri::False => continue,
            }
            prefix.push(y);
            let v = self.mq_dfs(run, prefix, base_len, members, remaining - 1, x, found);
            prefix.pop();
            match v {
                Tri::True => return Tri::True,
                Tri::Unknown => unknown = true,
                Tri::False => {}
            }
        }
        if unknown {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    /// Verify a suggested chain, padded with the last base line (a
    /// membership step keeps every prefix valid).
    fn verify_mq_chain(
        &self,
        run: &mut Run,
        a_list: &[LineId],
        steps: usize,
        x: LineId,
        mut chain: Vec<LineId>,
    ) -> Option<Tri> {
        let l = self.l() as LineId;
        if chain.len() > steps || chain.iter().any(|&v| v >= l) {
            return None;
        }
        let pad = chain.last().copied().unwrap_or(*a_list.last().unwrap());
        while chain.len() < steps {
            chain.push(pad);
        }
        let mut prefix = a_list.to_vec();
        for &b in &chain {
            if self.m_over(run, &prefix, b) != Tri::True {
                return None;
            }
            prefix.push(b);
        }
        if self.m_over(run, &prefix, x) != Tri::True {
            return None;
        }
        run.offer(|| {
            chain
                .iter()
                .enumerate()
                .map(|(i, &b)| (chain_name("b", i + 1), b))
                .collect()
        });
        Some(Tri::True)
    }

    /// Bounded-step reachability.
    pub fn mq_def(&self, a_list: &[LineId], q_steps: usize, x: LineId) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        self.check_base_len("mq", a_list)?;
        self.check_ids(a_list)?;
        self.check_ids(&[x])?;
        let mut run = self.run();
        let v = self.mq_value(&mut run, a_list, q_steps, x);
        Ok(self.finish(run, v))
    }

    // ---- parity definitions ---------------------------------------------

    fn delta_ext_dfs(
        &self,
        run: &mut Run,
        ext: &mut Vec<LineId>,
        m: usize,
        per_ext: &impl Fn(&Self, &mut Run, &[LineId]) -> Tri,
    ) -> Tri {
        if ext.len() == m {
            return per_ext(self, run, &ext[..]);
        }
        let mut unknown = false;
        for cand in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            ext.push(cand);
            let v = self.delta_ext_dfs(run, ext, m, per_ext);
            ext.pop();
            match v {
                Tri::True => return Tri::True,
                Tri::Unknown => unknown = true,
                Tri::False => {}
            }
        }
        if unknown {
            Tri::Unknown
        } else {
            Tri::False
        }
    }

    fn delta_value(
        &self,
        run: &mut Run,
        a1: LineId,
        a2: LineId,
        per_ext: impl Fn(&Self, &mut Run, &[LineId]) -> Tri,
    ) -> Tri {
        if a1 == a2 {
            return Tri::True;
        }
        let mut clique = None;
        match self.beta_sub(run, &mut clique) {
            Tri::True => {}
            Tri::False => return Tri::False,
            Tri::Unknown => return Tri::Unknown,
        }
        let m = self.model().params().m as usize;
        let mut ext = vec![a1, a2];
        self.delta_ext_dfs(run, &mut ext, m, &per_ext)
    }

    pub(crate) fn delta0_value(&self, run: &mut Run, a1: LineId, a2: LineId) -> Tri {
        let r = self.model().params().r as usize;
        self.delta_value(run, a1, a2, move |e, run, base| {
            let guided = e.guided();
            let pure_guided = guided.is_some() && !e.falls_back();
            let closure = if pure_guided {
                None
            } else {
                match e.m_closure(run, base) {
                    Some(c) => Some(c),
                    None => return Tri::Unknown,
                }
            };
            let mut unknown = false;
            for g in 0..e.l() as LineId {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                if let Some(p) = guided {
                    let ok = p.coplanar_partner(base, g).is_some_and(|h| {
                        (h as usize) < e.l()
                            && e.mq_sub(run, base, r, h).is_true()
                            && e.pi_sub(run, g, h).is_true()
                    });
                    if ok {
                        continue;
                    }
                    if pure_guided {
                        return Tri::Unknown;
                    }
                }
                let closure = closure.as_ref().unwrap();
                let mut found = false;
                let mut here_unknown = false;
                for h in closure.iter() {
                    if !run.charge(1) {
                        return Tri::Unknown;
                    }
                    let reach = e.mq_sub(run, base, r, h);
                    if reach == Tri::Unknown {
                        here_unknown = true;
                        continue;
                    }
                    if reach == Tri::False {
                        continue;
                    }
                    match e.pi_sub(run, g, h) {
                        Tri::True => {
                            found = true;
                            break;
                        }
                        Tri::Unknown => here_unknown = true,
                        Tri::False => {}
                    }
                }
                if found {
                    continue;
                }
                if here_unknown {
                    unknown = true;
                } else {
                    return Tri::False;
                }
            }
            if unknown {
                Tri::Unknown
            } else {
                Tri::True
            }
        })
    }

    pub(crate) fn delta1_value(&self, run: &mut Run, a1: LineId, a2: LineId) -> Tri {
        let r = self.model().params().r as usize;
        self.delta_value(run, a1, a2, move |e, run, base| {
            let mut unknown = false;
            for g in 0..e.l() as LineId {
                if !run.charge(1) {
                    return Tri::Unknown;
                }
                match e.mq_sub(run, base, r, g) {
                    Tri::True => {}
                    Tri::Unknown => unknown = true,
                    Tri::False => return Tri::False,
                }
            }
            if unknown {
                Tri::Unknown
            } else {
                Tri::True
            }
        })
    }

    /// Non-intersection, even affine dimension.
    pub fn delta0_def(&self, a1: LineId, a2: LineId) -> Result<EvalResult> {
        self.guard_affine(2, Some(0))?;
        self.check_ids(&[a1, a2])?;
        let mut run = self.run();
        let v = self.delta0_value(&mut run, a1, a2);
        Ok(self.finish(run, v))
    }

    /// Non-intersection, odd affine dimension.
    pub fn delta1_def(&self, a1: LineId, a2: LineId) -> Result<EvalResult> {
        self.guard_affine(2, Some(1))?;
        self.check_ids(&[a1, a2])?;
        let mut run = self.run();
        let v = self.delta1_value(&mut run, a1, a2);
        Ok(self.finish(run, v))
    }

    /// The combined affine non-intersection definition.
    pub fn notsim_affine(&self, a1: LineId, a2: LineId) -> Result<EvalResult> {
        self.guard_affine(2, None)?;
        self.check_ids(&[a1, a2])?;
        let mut run = self.run();
        let gamma = self.gamma_value(&mut run, a1, a2);
        if gamma == Tri::True {
            return Ok(self.finish(run, Tri::True));
        }
        let delta = if self.model().params().n % 2 == 0 {
            self.delta0_value(&mut run, a1, a2)
        } else {
            self.delta1_value(&mut run, a1, a2)
        };
        let v = match (gamma, delta) {
            (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Unknown,
        };
        Ok(self.finish(run, v))
    }
}

//! Skewness: defining "two lines do not meet" from crossing chains.
//!
//! Both predicates extend the argument pair `a1, b1` by bound lines
//! `a2 ... am` and then demand, for every line `g`, a chain (two chains in
//! odd dimension) of crossing steps that lands next to `g`. The chain
//! length `m` grows with the dimension so the steps can walk out of any
//! hyperplane.
//!
//! The blind evaluator exploits that chain steps only constrain
//! consecutive elements: the set of possible chain *endpoints* is computed
//! once per extension by a forward sweep of "level sets", after which the
//! per-`g` check is a bitset intersection (plus, in odd dimension, one
//! final crossing test per endpoint pair). Refutations are only issued
//! when every contributing sub-result was definite.

use std::collections::HashMap;

use line_graph::{LineId, LineSet, Tri};

use crate::{chain_name, Eval, EvalResult, Result, Run, Transcript};

/// Chain level sets with a completeness marker: `sets[i]` holds the
/// candidates for chain element `i + 2`, under-approximated when
/// `complete` is false (some membership test came back unknown).
struct Levels {
    sets: Vec<LineSet>,
    complete: bool,
}

type LevelCache = HashMap<(LineId, LineId), (LineSet, bool)>;

impl<'a> Eval<'a> {
    /// `{x : x meets `alink` and `prev`, and  x alink # x prev}` — the
    /// candidates for one chain slot given the previous element.
    fn skew_level_set(
        &self,
        run: &mut Run,
        cache: &mut LevelCache,
        alink: LineId,
        prev: LineId,
    ) -> (LineSet, bool) {
        if let Some(hit) = cache.get(&(alink, prev)) {
            return hit.clone();
        }
        let mut set = LineSet::empty(self.l());
        let mut complete = true;
        for x in self.cn2(alink, prev).iter() {
            if !run.charge(1) {
                complete = false;
                break;
            }
            match self.hash_sub(run, x, alink, x, prev) {
                Tri::True => set.insert(x),
                Tri::False => {}
                Tri::Unknown => complete = false,
            }
        }
        cache.insert((alink, prev), (set.clone(), complete));
        (set, complete)
    }

    /// Forward sweep over the extension `a = [a1, a2, ..., am]`.
    fn chain_levels(
        &self,
        run: &mut Run,
        cache: &mut LevelCache,
        a: &[LineId],
        b1: LineId,
    ) -> Levels {
        let (first, mut complete) = self.skew_level_set(run, cache, a[0], b1);
        let mut sets = vec![first];
        for &alink in &a[1..] {
            let prev_level = sets.last().unwrap().clone();
            let mut next = LineSet::empty(self.l());
            for x in prev_level.iter() {
                let (s, c) = self.skew_level_set(run, cache, alink, x);
                next.or_assign(&s);
                complete &= c;
            }
            sets.push(next);
        }
        Levels { sets, complete }
    }

    /// Rebuild one concrete chain ending at `last` by walking the level
    /// sets backwards (memoized crossing tests make this cheap).
    fn rebuild_chain(
        &self,
        run: &mut Run,
        a: &[LineId],
        levels: &Levels,
        last: LineId,
        prefix: &str,
    ) -> Transcript {
        let depth = levels.sets.len();
        let mut chain = vec![last];
        for i in (0..depth - 1).rev() {
            let alink = a[i + 1];
            let next = *chain.last().unwrap();
            let pred = levels.sets[i]
                .iter()
                .find(|&x| self.hash_sub(run, next, alink, next, x).is_true());
            match pred {
                Some(x) => chain.push(x),
                None => return Vec::new(),
            }
        }
        chain.reverse();
        chain
            .iter()
            .enumerate()
            .map(|(i, &x)| (chain_name(prefix, i + 2), x))
            .collect()
    }

    fn ext_entries(a: &[LineId]) -> Transcript {
        a[1..]
            .iter()
            .enumerate()
            .map(|(i, &x)| (chain_name("a", i + 2), x))
            .collect()
    }

    /// Even-dimension check for one extension: every line must meet some
    /// reachable chain endpoint.
    fn even_check(&self, run: &mut Run, cache: &mut LevelCache, a: &[LineId], b1: LineId) -> Tri {
        let guided = self.guided();
        let pure_guided = guided.is_some() && !self.falls_back();
        let levels = if pure_guided {
            None
        } else {
            Some(self.chain_levels(run, cache, a, b1))
        };
        if let Some(lv) = &levels {
            if lv.sets.last().unwrap().is_empty() && lv.complete {
                return Tri::False;
            }
        }
        let mut unknown = false;
        for g in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            if let Some(p) = guided {
                let ok = p
                    .even_chain(a, b1, g)
                    .map(|chain| {
                        self.verify_chain(run, a, b1, &chain)
                            && self.sim(g, *chain.last().unwrap())
                    })
                    .unwrap_or(false);
                if ok {
                    continue;
                }
                if pure_guided {
                    return Tri::Unknown;
                }
            }
            let lv = levels.as_ref().unwrap();
            if lv.sets.last().unwrap().intersects_words(self.model().row(g)) {
                continue;
            }
            if lv.complete {
                return Tri::False;
            }
            unknown = true;
        }
        if unknown {
            return Tri::Unknown;
        }
        if let Some(lv) = &levels {
            if let Some(end) = lv.sets.last().unwrap().first_common_with(self.model().row(0)) {
                let chain = self.rebuild_chain(run, a, lv, end, "b");
                run.offer(|| {
                    let mut w = Self::ext_entries(a);
                    w.push(("g", 0));
                    w.extend(chain);
                    w
                });
            }
        } else {
            run.offer(|| Self::ext_entries(a));
        }
        Tri::True
    }

    /// Odd-dimension check: two chains whose endpoints cross over `g`.
    fn odd_check(&self, run: &mut Run, cache: &mut LevelCache, a: &[LineId], b1: LineId) -> Tri {
        let guided = self.guided();
        let pure_guided = guided.is_some() && !self.falls_back();
        let levels = if pure_guided {
            None
        } else {
            Some(self.chain_levels(run, cache, a, b1))
        };
        if let Some(lv) = &levels {
            if lv.sets.last().unwrap().is_empty() && lv.complete {
                return Tri::False;
            }
        }
        let mut unknown = false;
        let mut first_pair: Option<(LineId, LineId)> = None;
        for g in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            if let Some(p) = guided {
                let ok = p
                    .odd_chains(a, b1, g)
                    .map(|(bs, cs)| {
                        self.verify_chain(run, a, b1, &bs)
                            && self.verify_chain(run, a, b1, &cs)
                            && self
                                .hash_sub(run, *bs.last().unwrap(), g, *cs.last().unwrap(), g)
                                .is_true()
                    })
                    .unwrap_or(false);
                if ok {
                    continue;
                }
                if pure_guided {
                    return Tri::Unknown;
                }
            }
            let lv = levels.as_ref().unwrap();
            // Both chain endpoints must meet g for the final crossing.
            let mut ends = lv.sets.last().unwrap().clone();
            ends.and_words(self.model().row(g));
            let mut here = Tri::False;
            'pairs: for x in ends.iter() {
                for y in ends.iter() {
                    if !run.charge(1) {
                        return Tri::Unknown;
                    }
                    match self.hash_sub(run, x, g, y, g) {
                        Tri::True => {
                            if first_pair.is_none() && g == 0 {
                                first_pair = Some((x, y));
                            }
                            here = Tri::True;
                            break 'pairs;
                        }
                        Tri::Unknown => here = Tri::Unknown,
                        Tri::False => {}
                    }
                }
            }
            match here {
                Tri::True => continue,
                Tri::False if lv.complete => return Tri::False,
                _ => unknown = true,
            }
        }
        if unknown {
            return Tri::Unknown;
        }
        match (&levels, first_pair) {
            (Some(lv), Some((x, y))) => {
                let bs = self.rebuild_chain(run, a, lv, x, "b");
                let cs = self.rebuild_chain(run, a, lv, y, "c");
                run.offer(|| {
                    let mut w = Self::ext_entries(a);
                    w.push(("g", 0));
                    w.extend(bs);
                    w.extend(cs);
                    w
                });
            }
            _ => run.offer(|| Self::ext_entries(a)),
        }
        Tri::True
    }

    /// Verify a suggested chain `b2 ... b_{m+1}` step by step.
    fn verify_chain(&self, run: &mut Run, a: &[LineId], b1: LineId, chain: &[LineId]) -> bool {
        if chain.len() != a.len() {
            return false;
        }
        let l = self.l() as LineId;
        if chain.iter().any(|&x| x >= l) {
            return false;
        }
        let mut prev = b1;
        for (i, &x) in chain.iter().enumerate() {
            if !self.hash_sub(run, x, a[i], x, prev).is_true() {
                return false;
            }
            prev = x;
        }
        true
    }

    /// Shared driver: equality disjunct, then the extension search.
    fn notsim_value(
        &self,
        run: &mut Run,
        a1: LineId,
        b1: LineId,
        check: impl Fn(&Self, &mut Run, &mut LevelCache, &[LineId], LineId) -> Tri + Copy,
    ) -> Tri {
        if a1 == b1 {
            return Tri::True;
        }
        let m = self.model().params().m as usize;
        let mut cache = LevelCache::new();
        if m == 1 {
            return check(self, run, &mut cache, &[a1], b1);
        }
        if let Some(p) = self.guided() {
            if let Some(ext) = p.skew_extension(a1, b1, m - 1) {
                let l = self.l() as LineId;
                if ext.len() == m - 1 && ext.iter().all(|&x| x < l) {
                    let mut chain = vec![a1];
                    chain.extend_from_slice(&ext);
                    if check(self, run, &mut cache, &chain, b1) == Tri::True {
                        return Tri::True;
                    }
                }
            }
            if !self.falls_back() {
                return Tri::Unknown;
            }
        }
        let mut ext = vec![a1];
        self.notsim_ext_dfs(run, &mut ext, b1, m, &mut cache, check)
    }

    fn notsim_ext_dfs(
        &self,
        run: &mut Run,
        ext: &mut Vec<LineId>,
        b1: LineId,
        m: usize,
        cache: &mut LevelCache,
        check: impl Fn(&Self, &mut Run, &mut LevelCache, &[LineId], LineId) -> Tri + Copy,
    ) -> Tri {
        if ext.len() == m {
            return check(self, run, cache, ext, b1);
        }
        let mut unknown = false;
        for cand in 0..self.l() as LineId {
            if !run.charge(1) {
                return Tri::Unknown;
            }
            ext.push(cand);
            let v = self.notsim_ext_dfs(run, ext, b1, m, cache, check);
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

    /// Non-intersection in even projective dimension.
    pub fn notsim_proj_even(&self, a1: LineId, b1: LineId) -> Result<EvalResult> {
        self.guard_projective(4, Some(0))?;
        self.check_ids(&[a1, b1])?;
        let mut run = self.run();
        let v = self.notsim_value(&mut run, a1, b1, Self::even_check);
        Ok(self.finish(run, v))
    }

    /// Non-intersection in odd projective dimension (five and up).
    pub fn notsim_proj_odd(&self, a1: LineId, b1: LineId) -> Result<EvalResult> {
        self.guard_projective(5, Some(1))?;
        self.check_ids(&[a1, b1])?;
        let mut run = self.run();
        let v = self.notsim_value(&mut run, a1, b1, Self::odd_check);
        Ok(self.finish(run, v))
    }
}

#[cfg(test)]
mod tests {
    use crate::test_support::{eval, fixture};
    use crate::PredicateError;
    use line_graph::{LineId, Tri};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn even_dimension_separates_skew_from_meeting() {
        let fix = fixture("pg", 4, 2);
        let e = eval(&fix);
        let l = fix.model.line_count() as LineId;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen_skew = 0;
        let mut seen_meet = 0;
        while seen_skew < 25 || seen_meet < 25 {
            let a = rng.gen_range(0..l);
            let b = rng.gen_range(0..l);
            if a == b {
                continue;
            }
            let meets = fix.model.sim(a, b);
            if meets && seen_meet >= 25 || !meets && seen_skew >= 25 {
                continue;
            }
            let got = e.notsim_proj_even(a, b).unwrap().value;
            assert_eq!(got, Tri::from_bool(!meets), "pair ({a},{b})");
            if meets {
                seen_meet += 1;
            } else {
                seen_skew += 1;
            }
        }
        assert_eq!(e.notsim_proj_even(3, 3).unwrap().value, Tri::True);
    }

    #[test]
    fn even_dimension_true_results_carry_chain_witnesses() {
        let fix = fixture("pg", 4, 2);
        let e = eval(&fix);
        let (a, b) = fix.first_skew_pair();
        let res = e.notsim_proj_even(a, b).unwrap();
        assert_eq!(res.value, Tri::True);
        let w = res.witnesses.unwrap();
        let b2 = w.iter().find(|(n, _)| *n == "b2").expect("chain entry").1;
        assert!(fix.model.sim(0, b2));
        assert_eq!(e.hash_def(b2, a, b2, b).unwrap().value, Tri::True);
    }

    #[test]
    fn odd_dimension_separates_skew_from_meeting() {
        let fix = fixture("pg", 5, 2);
        let e = eval(&fix);
        let l = fix.model.line_count() as LineId;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // Positive (skew) pairs are the cheap direction; meeting pairs
        // need the full extension sweep to refute, so test fewer.
        let mut skew = Vec::new();
        let mut meet = Vec::new();
        while skew.len() < 6 || meet.len() < 2 {
            let a = rng.gen_range(0..l);
            let b = rng.gen_range(0..l);
            if a == b {
                continue;
            }
            if fix.model.sim(a, b) {
                if meet.len() < 2 {
                    meet.push((a, b));
                }
            } else if skew.len() < 6 {
                skew.push((a, b));
            }
        }
        for (a, b) in skew {
            assert_eq!(e.notsim_proj_odd(a, b).unwrap().value, Tri::True, "skew ({a},{b})");
        }
        for (a, b) in meet {
            assert_eq!(e.notsim_proj_odd(a, b).unwrap().value, Tri::False, "meet ({a},{b})");
        }
        assert_eq!(e.notsim_proj_odd(11, 11).unwrap().value, Tri::True);
    }

    #[test]
    fn odd_dimension_witnesses_name_extension_and_chains() {
        let fix = fixture("pg", 5, 2);
        let e = eval(&fix);
        let (a, b) = fix.first_skew_pair();
        let res = e.notsim_proj_odd(a, b).unwrap();
        assert_eq!(res.value, Tri::True);
        let w = res.witnesses.unwrap();
        for name in ["a2", "g", "b2", "b3", "c2", "c3"] {
            assert!(w.iter().any(|(n, _)| *n == name), "missing {name} in {w:?}");
        }
        let find = |name: &str| w.iter().find(|(n, _)| *n == name).unwrap().1;
        let (a2, b2, b3) = (find("a2"), find("b2"), find("b3"));
        assert_eq!(e.hash_def(b2, a, b2, b).unwrap().value, Tri::True);
        assert_eq!(e.hash_def(b3, a2, b3, b2).unwrap().value, Tri::True);
    }

    #[test]
    fn dimension_guards_reject_mismatched_models() {
        let even_on_odd = fixture("pg", 5, 2);
        let err = eval(&even_on_odd).notsim_proj_even(0, 1).unwrap_err();
        assert!(matches!(err, PredicateError::WrongDimension { .. }));

        let odd_on_even = fixture("pg", 4, 2);
        let err = eval(&odd_on_even).notsim_proj_odd(0, 1).unwrap_err();
        assert!(matches!(err, PredicateError::WrongDimension { .. }));

        let affine = fixture("ag", 3, 2);
        let err = eval(&affine).notsim_proj_even(0, 1).unwrap_err();
        assert!(matches!(err, PredicateError::WrongDimension { .. }));
    }
}

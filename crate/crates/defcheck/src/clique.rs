//! Exact maximum-clique search over the pairwise-intersection relation,
//! used as the independent oracle side of the clique ceiling checks. The
//! adjacency is taken straight from the meet oracle, not from the model
//! the predicates run on.

use finite_geometry::Space;
use line_graph::LineId;

/// Branch-and-bound clique search with a greedy-coloring bound. Exact;
/// intended for desk-scale models.
pub struct CliqueSearch {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl CliqueSearch {
    pub fn from_space(space: &Space) -> CliqueSearch {
        let n = space.line_count();
        let words = n.div_ceil(64);
        let mut adj = vec![0u64; n * words];
        for a in 0..n as u16 {
            for b in 0..n as u16 {
                if a != b && space.meet(a, b).is_point() {
                    adj[a as usize * words + b as usize / 64] |= 1 << (b % 64);
                }
            }
        }
        CliqueSearch { n, words, adj }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    /// The maximum clique and one witness realising it.
    pub fn max_clique(&self) -> (usize, Vec<LineId>) {
        let mut best = Vec::new();
        let cand: Vec<usize> = (0..self.n).collect();
        self.expand(&mut Vec::new(), cand, &mut best, usize::MAX);
        best.sort_unstable();
        (best.len(), best.iter().map(|&v| v as LineId).collect())
    }

    /// A clique of at least `k` lines, if one exists. Stops at the first
    /// witness; a `None` means the search exhausted every branch.
    pub fn find_clique(&self, k: usize) -> Option<Vec<LineId>> {
        let mut best = Vec::new();
        let cand: Vec<usize> = (0..self.n).collect();
        self.expand(&mut Vec::new(), cand, &mut best, k);
        if best.len() >= k {
            best.sort_unstable();
            Some(best.iter().map(|&v| v as LineId).collect())
        } else {
            None
        }
    }

    /// Expand the current clique over `cand`, recording the best clique
    /// found; returns early once `target` is reached.
    fn expand(&self, cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>, target: usize) -> bool {
        let (order, colors) = self.color(&cand);
        for i in (0..order.len()).rev() {
            if cur.len() + colors[i] <= best.len() {
                return false;
            }
            let v = order[i];
            cur.push(v);
            if cur.len() > best.len() {
                *best = cur.clone();
                if best.len() >= target {
                    cur.pop();
                    return true;
                }
            }
            let next: Vec<usize> =
                order[..i].iter().copied().filter(|&u| self.adjacent(u, v)).collect();
            if self.expand(cur, next, best, target) {
                cur.pop();
                return true;
            }
            cur.pop();
        }
        false
    }

    /// Greedy sequential coloring; vertices returned in ascending color
    /// order, each with its color number as a clique-size bound.
    fn color(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            match classes
                .iter_mut()
                .find(|class| class.iter().all(|&u| !self.adjacent(u, v)))
            {
                Some(class) => class.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        for (ci, class) in classes.iter().enumerate() {
            for &v in class {
                order.push(v);
                colors.push(ci + 1);
            }
        }
        (order, colors)
    }
}

use std::io::{self, BufRead};
use std::sync::atomic::{AtomicU64, Ordering};

use finite_geometry::Space;

use crate::{LineId, LineSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Projective,
    Affine,
}

impl ModelKind {
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Projective => "pg",
            ModelKind::Affine => "ag",
        }
    }

    pub fn from_tag(tag: &str) -> Option<ModelKind> {
        match tag {
            "pg" => Some(ModelKind::Projective),
            "ag" => Some(ModelKind::Affine),
            _ => None,
        }
    }
}

/// Shape parameters carried by the model: kind, dimension and order, plus
/// the derived quantities the chain predicates need (`m`, `r`, `k`). No
/// coordinate data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub n: u32,
    pub q: u32,
    pub m: u32,
    pub r: u32,
    pub k: u64,
}

impl ModelParams {
    pub fn new(kind: ModelKind, n: u32, q: u32) -> Self {
        let m = match kind {
            ModelKind::Projective => (n - 1) / 2,
            ModelKind::Affine => (n + 1) / 2,
        };
        ModelParams {
            kind,
            n,
            q,
            m,
            r: (1u32 << (m + 1)) - 4,
            k: (1u64 << (n - 1)) * ((1u64 << n) - 1),
        }
    }
}

/// Errors from the graph exchange format.
#[derive(Debug, thiserror::Error)]
pub enum GraphIoError {
    #[error("parse error at line {line}, column {col}: {what}")]
    Parse {
        line: usize,
        col: usize,
        what: String,
    },
    #[error("adjacency lists edge {0} -> {1} without the reverse direction")]
    AsymmetricAdjacency(LineId, LineId),
    #[error("adjacency lists a line as intersecting itself: {0}")]
    ReflexiveAdjacency(LineId),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The line universe and the intersection relation, as bitset adjacency.
///
/// Immutable after construction and safe for unrestricted concurrent reads.
/// Relation reads go through counted accessors ([`IntersectionModel::sim`],
/// [`IntersectionModel::row`], …) so a verification pass can record, via
/// [`IntersectionModel::relation_reads`], that predicate evaluation touched
/// nothing but the intersection relation.
#[derive(Debug)]
pub struct IntersectionModel {
    params: ModelParams,
    line_count: usize,
    words: usize,
    adj: Vec<u64>,
    reads: AtomicU64,
}

impl IntersectionModel {
    /// Project the intersection relation out of a geometry. The adjacency
    /// bit is set exactly where the meet is a point; coordinates are not
    /// retained.
    pub fn from_space(space: &Space) -> Self {
        let sp = space.params();
        let kind = match sp.kind {
            finite_geometry::Kind::Projective => ModelKind::Projective,
            finite_geometry::Kind::Affine => ModelKind::Affine,
        };
        let params = ModelParams::new(kind, sp.n, sp.q);
        let line_count = space.line_count();
        let words = line_count.div_ceil(64);
        let mut adj = vec![0u64; line_count * words];
        for a in 0..line_count {
            for b in 0..line_count {
                if space.meet(a as LineId, b as LineId).is_point() {
                    adj[a * words + b / 64] |= 1u64 << (b % 64);
                }
            }
        }
        let model = IntersectionModel {
            params,
            line_count,
            words,
            adj,
            reads: AtomicU64::new(0),
        };
        model.debug_validate();
        model
    }

    fn debug_validate(&self) {
        #[cfg(debug_assertions)]
        for a in 0..self.line_count as LineId {
            assert!(!self.sim_uncounted(a, a), "irreflexive");
            for b in 0..self.line_count as LineId {
                assert_eq!(
                    self.sim_uncounted(a, b),
                    self.sim_uncounted(b, a),
                    "symmetric"
                );
            }
        }
    }

    #[inline]
    fn touch(&self) {
        self.reads.fetch_add(1, Ordering::Relaxed);
    }

    /// Number of intersection-relation reads since construction or reset.
    pub fn relation_reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn reset_relation_reads(&self) {
        self.reads.store(0, Ordering::Relaxed);
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn line_count(&self) -> usize {
        self.line_count
    }

    /// Words per adjacency row.
    pub fn row_words(&self) -> usize {
        self.words
    }

    #[inline]
    fn sim_uncounted(&self, a: LineId, b: LineId) -> bool {
        self.adj[a as usize * self.words + b as usize / 64] >> (b as usize % 64) & 1 == 1
    }

    /// The intersection relation: true iff the lines are distinct and share
    /// a point.
    #[inline]
    pub fn sim(&self, a: LineId, b: LineId) -> bool {
        self.touch();
        self.sim_uncounted(a, b)
    }

    /// Raw adjacency row of `a` (one read).
    #[inline]
    pub fn row(&self, a: LineId) -> &[u64] {
        self.touch();
        &self.adj[a as usize * self.words..(a as usize + 1) * self.words]
    }

    /// Neighbor set of `a` as an owned [`LineSet`].
    pub fn neighbors(&self, a: LineId) -> LineSet {
        LineSet::from_words(self.line_count, self.row(a).to_vec())
    }

    pub fn degree(&self, a: LineId) -> usize {
        self.row(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lines intersecting every line in `of`; the empty intersection is the
    /// full universe.
    pub fn common_neighbors(&self, of: &[LineId]) -> LineSet {
        let mut acc = LineSet::full(self.line_count);
        for &a in of {
            acc.and_words(self.row(a));
        }
        acc
    }

    /// Writes the graph exchange format: a header
    /// `model <kind> n=<n> q=<q> lines=<L>`, then one
    /// `adj <id>: <id> <id> ...` row per line, ids ascending.
    pub fn export<W: io::Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(
            sink,
            "model {} n={} q={} lines={}",
            self.params.kind.tag(),
            self.params.n,
            self.params.q,
            self.line_count
        )?;
        for a in 0..self.line_count as LineId {
            write!(sink, "adj {a}:")?;
            for b in 0..self.line_count as LineId {
                if self.sim_uncounted(a, b) {
                    write!(sink, " {b}")?;
                }
            }
            writeln!(sink)?;
        }
        Ok(())
    }

    /// Reads the graph exchange format back; validates shape, symmetry and
    /// irreflexivity.
    pub fn import<R: BufRead>(source: R) -> Result<Self, GraphIoError> {
        let parse = |line: usize, col: usize, what: &str| GraphIoError::Parse {
            line,
            col,
            what: what.to_string(),
        };
        let mut lines = source.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse(1, 1, "missing header"))??;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("model") {
            return Err(parse(1, 1, "expected `model` header"));
        }
        let kind = parts
            .next()
            .and_then(ModelKind::from_tag)
            .ok_or_else(|| parse(1, 7, "expected kind `pg` or `ag`"))?;
        let mut field = |name: &str| -> Result<u64, GraphIoError> {
            let tok = parts
                .next()
                .ok_or_else(|| parse(1, header.len(), "truncated header"))?;
            tok.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse(1, 1, &format!("expected `{name}=<int>`")))
        };
        let n = field("n")? as u32;
        let q = field("q")? as u32;
        let line_count = field("lines")? as usize;
        let params = ModelParams::new(kind, n, q);

        let words = line_count.div_ceil(64);
        let mut adj = vec![0u64; line_count * words];
        let mut rows_seen = 0usize;
        for (idx, row) in lines.enumerate() {
            let row = row?;
            let lineno = idx + 2;
            if row.trim().is_empty() {
                continue;
            }
            let rest = row
                .strip_prefix("adj ")
                .ok_or_else(|| parse(lineno, 1, "expected `adj <id>: ...`"))?;
            let (id_str, nbrs) = rest
                .split_once(':')
                .ok_or_else(|| parse(lineno, rest.len(), "missing `:`"))?;
            let a: usize = id_str
                .trim()
                .parse()
                .map_err(|_| parse(lineno, 5, "bad line id"))?;
            if a != rows_seen {
                return Err(parse(lineno, 5, "row ids must be 0..lines ascending"));
            }
            if a >= line_count {
                return Err(parse(lineno, 5, "line id out of range"));
            }
            for tok in nbrs.split_whitespace() {
                let b: usize = tok
                    .parse()
                    .map_err(|_| parse(lineno, 1, "bad neighbor id"))?;
                if b >= line_count {
                    return Err(parse(lineno, 1, "neighbor id out of range"));
                }
                adj[a * words + b / 64] |= 1u64 << (b % 64);
            }
            rows_seen += 1;
        }
        if rows_seen != line_count {
            return Err(parse(
                rows_seen + 1,
                1,
                &format!("expected {line_count} rows, found {rows_seen}"),
            ));
        }

        let model = IntersectionModel {
            params,
            line_count,
            words,
            adj,
            reads: AtomicU64::new(0),
        };
        for a in 0..line_count as LineId {
            if model.sim_uncounted(a, a) {
                return Err(GraphIoError::ReflexiveAdjacency(a));
            }
            for b in 0..line_count as LineId {
                if model.sim_uncounted(a, b) && !model.sim_uncounted(b, a) {
                    return Err(GraphIoError::AsymmetricAdjacency(a, b));
                }
            }
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use finite_geometry::Kind;

    fn model(kind: Kind, n: u32, q: u32) -> IntersectionModel {
        IntersectionModel::from_space(&Space::build(kind, n, q).unwrap())
    }

    #[test]
    fn degrees_match_the_geometry() {
        for (kind, n, q, degree) in [
            (Kind::Projective, 3, 2, 18),
            (Kind::Projective, 4, 2, 42),
            (Kind::Affine, 3, 2, 12),
            (Kind::Affine, 3, 3, 36),
        ] {
            let m = model(kind, n, q);
            for a in 0..m.line_count() as LineId {
                assert_eq!(m.degree(a), degree, "{kind:?} n={n} q={q} line {a}");
            }
        }
    }

    #[test]
    fn adjacency_is_irreflexive_and_symmetric() {
        let m = model(Kind::Affine, 3, 2);
        for a in 0..m.line_count() as LineId {
            assert!(!m.sim(a, a));
            for b in 0..m.line_count() as LineId {
                assert_eq!(m.sim(a, b), m.sim(b, a));
            }
        }
    }

    #[test]
    fn common_neighbors_of_empty_list_is_the_universe() {
        let m = model(Kind::Projective, 3, 2);
        let all = m.common_neighbors(&[]);
        assert!(all.is_full());
        assert_eq!(all.len(), 35);
    }

    #[test]
    fn common_neighbors_agrees_with_pairwise_scan() {
        let m = model(Kind::Projective, 3, 2);
        let ids = [0 as LineId, 1, 7];
        let set = m.common_neighbors(&ids);
        for h in 0..m.line_count() as LineId {
            let manual = ids.iter().all(|&a| m.sim(a, h));
            assert_eq!(set.contains(h), manual);
        }
    }

    #[test]
    fn export_import_round_trip_is_identity() {
        let m = model(Kind::Projective, 3, 2);
        let mut buf = Vec::new();
        m.export(&mut buf).unwrap();
        let back = IntersectionModel::import(&buf[..]).unwrap();
        assert_eq!(back.line_count(), m.line_count());
        assert_eq!(back.params(), m.params());
        for a in 0..m.line_count() as LineId {
            for b in 0..m.line_count() as LineId {
                assert_eq!(m.sim(a, b), back.sim(a, b));
            }
        }
        let mut again = Vec::new();
        back.export(&mut again).unwrap();
        assert_eq!(buf, again, "round trip is bit-exact");
    }

    #[test]
    fn import_rejects_asymmetric_adjacency() {
        let text = "model pg n=3 q=2 lines=6\nadj 0: 3\nadj 1:\nadj 2:\nadj 3: 0 5\nadj 4:\nadj 5:\n";
        match IntersectionModel::import(text.as_bytes()) {
            Err(GraphIoError::AsymmetricAdjacency(3, 5)) => {}
            other => panic!("expected asymmetric error, got {other:?}"),
        }
    }

    #[test]
    fn import_rejects_header_count_mismatch() {
        let text = "model pg n=3 q=2 lines=4\nadj 0:\nadj 1:\n";
        assert!(matches!(
            IntersectionModel::import(text.as_bytes()),
            Err(GraphIoError::Parse { .. })
        ));
    }

    #[test]
    fn relation_read_counter_tracks_accessors() {
        let m = model(Kind::Affine, 3, 2);
        m.reset_relation_reads();
        let _ = m.sim(0, 1);
        let _ = m.row(4);
        let _ = m.common_neighbors(&[0, 1, 2]);
        assert_eq!(m.relation_reads(), 5);
    }
}

use std::collections::{BTreeSet, HashMap};
use std::io;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::field::Gf;
use crate::{GeometryError, LineId, Result};

/// Models with more lines than this are rejected unless an explicit cap is
/// given; the in-memory meet table and downstream memo tables are sized for
/// desk-scale geometries.
pub const DEFAULT_LINE_CAP: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Projective,
    Affine,
}

impl Kind {
    /// Short tag used in file headers and space-spec strings.
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Projective => "pg",
            Kind::Affine => "ag",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Kind> {
        match tag {
            "pg" => Some(Kind::Projective),
            "ag" => Some(Kind::Affine),
            _ => None,
        }
    }
}

/// Dense point index, valid within one [`Space`].
pub type PointId = u32;

/// Build parameters plus the derived quantities used by the chain-style
/// predicates: `m` is the rank parameter (`(n-1)/2` projective, `(n+1)/2`
/// affine, rounded down), `r = 2^(m+1) - 4` the auxiliary chain length, and
/// `k = 2^(n-1) * (2^n - 1)` the affine GF(2) line count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceParams {
    pub kind: Kind,
    pub n: u32,
    pub q: u32,
    pub m: u32,
    pub r: u32,
    pub k: u64,
}

impl SpaceParams {
    pub fn new(kind: Kind, n: u32, q: u32) -> Result<Self> {
        if n < 3 {
            return Err(GeometryError::DimensionTooSmall(n));
        }
        Gf::new(q)?;
        let m = match kind {
            Kind::Projective => (n - 1) / 2,
            Kind::Affine => (n + 1) / 2,
        };
        let r = (1u32 << (m + 1)) - 4;
        let k = (1u64 << (n - 1)) * ((1u64 << n) - 1);
        Ok(SpaceParams { kind, n, q, m, r, k })
    }

    /// Number of points, by closed form.
    pub fn point_count(&self) -> u64 {
        let q = self.q as u64;
        match self.kind {
            Kind::Projective => (q.pow(self.n + 1) - 1) / (q - 1),
            Kind::Affine => q.pow(self.n),
        }
    }

    /// Number of lines, by closed form.
    pub fn line_count(&self) -> u64 {
        let q = self.q as u64;
        match self.kind {
            // Gaussian binomial [n+1 choose 2]_q
            Kind::Projective => {
                (q.pow(self.n + 1) - 1) * (q.pow(self.n) - 1) / ((q * q - 1) * (q - 1))
            }
            Kind::Affine => q.pow(self.n - 1) * (q.pow(self.n) - 1) / (q - 1),
        }
    }

    /// Number of lines through one point (pencil size).
    pub fn pencil_size(&self) -> u64 {
        let q = self.q as u64;
        (q.pow(self.n) - 1) / (q - 1)
    }

    /// Points per line.
    pub fn line_size(&self) -> u32 {
        match self.kind {
            Kind::Projective => self.q + 1,
            Kind::Affine => self.q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub id: PointId,
    /// Projective: normalized homogeneous vector of length n+1 (first nonzero
    /// coordinate is 1). Affine: plain vector of length n.
    pub coords: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub id: LineId,
    /// Sorted, deduplicated incident point ids.
    pub points: Vec<PointId>,
    /// Two distinct spanning points (the lowest two by id).
    pub basis: (PointId, PointId),
}

/// How two lines relate: `Parallel` occurs only in affine spaces
/// (disjoint with equal canonical direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeetResult {
    Equal,
    Point(PointId),
    Skew,
    Parallel,
}

impl MeetResult {
    /// True when the two lines are distinct and share exactly one point.
    #[inline]
    pub fn is_point(self) -> bool {
        matches!(self, MeetResult::Point(_))
    }

    #[inline]
    pub fn point(self) -> Option<PointId> {
        match self {
            MeetResult::Point(p) => Some(p),
            _ => None,
        }
    }
}

// meets-table encoding (i32): point id >= 0, or one of these sentinels.
const MEET_EQUAL: i32 = -2;
const MEET_SKEW: i32 = -1;
const MEET_PARALLEL: i32 = -3;

/// A fully materialized finite geometry.
///
/// Immutable after construction; all accessors take `&self` and may be used
/// concurrently. Semantic accessors (anything revealing coordinates,
/// incidence, or meet data) increment a relaxed atomic read counter so
/// verification harnesses can prove a code path never consulted the
/// coordinate side.
#[derive(Debug)]
pub struct Space {
    params: SpaceParams,
    gf: Gf,
    points: Vec<Point>,
    lines: Vec<Line>,
    point_to_lines: Vec<Vec<LineId>>,
    pair_line: HashMap<(PointId, PointId), LineId>,
    meets: Vec<i32>,
    /// Affine only: canonical direction class per line (index into `dirs`).
    line_dir: Vec<u32>,
    dirs: Vec<Vec<u8>>,
    reads: AtomicU64,
}

impl Space {
    pub fn build(kind: Kind, n: u32, q: u32) -> Result<Space> {
        Self::build_with_cap(kind, n, q, DEFAULT_LINE_CAP)
    }

    pub fn build_with_cap(kind: Kind, n: u32, q: u32, cap: u64) -> Result<Space> {
        let params = SpaceParams::new(kind, n, q)?;
        if params.line_count() > cap {
            return Err(GeometryError::ModelTooLarge {
                lines: params.line_count(),
                cap,
            });
        }
        let gf = Gf::new(q)?;
        let (points, pid) = enumerate_points(params, &gf);
        let line_sets = enumerate_lines(params, &gf, &points, &pid);

        assert_eq!(points.len() as u64, params.point_count(), "point count");
        assert_eq!(line_sets.len() as u64, params.line_count(), "line count");

        let lines: Vec<Line> = line_sets
            .into_iter()
            .enumerate()
            .map(|(id, pts)| {
                assert_eq!(pts.len(), params.line_size() as usize);
                let basis = (pts[0], pts[1]);
                Line {
                    id: id as LineId,
                    points: pts,
                    basis,
                }
            })
            .collect();

        let mut point_to_lines = vec![Vec::new(); points.len()];
        let mut pair_line = HashMap::new();
        for line in &lines {
            for (i, &u) in line.points.iter().enumerate() {
                point_to_lines[u as usize].push(line.id);
                for &v in &line.points[i + 1..] {
                    let prev = pair_line.insert((u, v), line.id);
                    assert!(prev.is_none(), "two lines through one point pair");
                }
            }
        }
        for pencil in &point_to_lines {
            assert_eq!(pencil.len() as u64, params.pencil_size(), "pencil size");
        }

        let (line_dir, dirs) = match kind {
            Kind::Affine => direction_classes(&gf, &points, &lines),
            Kind::Projective => (Vec::new(), Vec::new()),
        };

        let meets = meet_table(params, &lines, &line_dir);

        Ok(Space {
            params,
            gf,
            points,
            lines,
            point_to_lines,
            pair_line,
            meets,
            line_dir,
            dirs,
            reads: AtomicU64::new(0),
        })
    }

    #[inline]
    fn touch(&self) {
        self.reads.fetch_add(1, Ordering::Relaxed);
    }

    /// Number of semantic reads since construction or the last reset.
    pub fn semantic_reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn reset_semantic_reads(&self) {
        self.reads.store(0, Ordering::Relaxed);
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    pub fn gf(&self) -> Gf {
        self.gf
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn point(&self, id: PointId) -> &Point {
        self.touch();
        &self.points[id as usize]
    }

    pub fn line(&self, id: LineId) -> &Line {
        self.touch();
        &self.lines[id as usize]
    }

    /// All lines through a point, ascending.
    pub fn lines_through(&self, p: PointId) -> &[LineId] {
        self.touch();
        &self.point_to_lines[p as usize]
    }

    /// The unique line through two distinct points.
    pub fn line_through(&self, u: PointId, v: PointId) -> Option<LineId> {
        self.touch();
        let key = if u < v { (u, v) } else { (v, u) };
        self.pair_line.get(&key).copied()
    }

    pub fn check_line(&self, a: LineId) -> Result<()> {
        if (a as usize) < self.lines.len() {
            Ok(())
        } else {
            Err(GeometryError::InvalidId(a as usize))
        }
    }

    pub fn meet(&self, a: LineId, b: LineId) -> MeetResult {
        self.touch();
        self.meet_untouched(a, b)
    }

    #[inline]
    pub(crate) fn meet_untouched(&self, a: LineId, b: LineId) -> MeetResult {
        match self.meets[a as usize * self.lines.len() + b as usize] {
            MEET_EQUAL => MeetResult::Equal,
            MEET_SKEW => MeetResult::Skew,
            MEET_PARALLEL => MeetResult::Parallel,
            p => MeetResult::Point(p as PointId),
        }
    }

    /// Affine parallelism: disjoint with the same canonical direction.
    pub fn parallel(&self, a: LineId, b: LineId) -> bool {
        self.touch();
        matches!(self.meet_untouched(a, b), MeetResult::Parallel)
    }

    /// Affine: canonical direction class id of a line.
    pub fn direction_class(&self, a: LineId) -> u32 {
        self.touch();
        self.line_dir[a as usize]
    }

    /// Affine: number of distinct direction classes.
    pub fn direction_count(&self) -> usize {
        self.dirs.len()
    }

    /// Writes the space in the text exchange format:
    /// a header `space <kind> n=<n> q=<q> points=<P> lines=<L>` followed by
    /// one `<line-id>: <point-id> ...` row per line.
    pub fn export<W: io::Write>(&self, mut sink: W) -> io::Result<()> {
        writeln!(
            sink,
            "space {} n={} q={} points={} lines={}",
            self.params.kind.tag(),
            self.params.n,
            self.params.q,
            self.points.len(),
            self.lines.len()
        )?;
        for line in &self.lines {
            write!(sink, "{}:", line.id)?;
            for p in &line.points {
                write!(sink, " {p}")?;
            }
            writeln!(sink)?;
        }
        Ok(())
    }
}

/// Enumerate canonical points in lexicographic coordinate order.
fn enumerate_points(params: SpaceParams, gf: &Gf) -> (Vec<Point>, HashMap<Vec<u8>, PointId>) {
    let vlen = match params.kind {
        Kind::Projective => params.n + 1,
        Kind::Affine => params.n,
    } as usize;
    let mut set: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut v = vec![0u8; vlen];
    loop {
        match params.kind {
            Kind::Projective => {
                if let Some(nv) = gf.normalize(&v) {
                    set.insert(nv);
                }
            }
            Kind::Affine => {
                set.insert(v.clone());
            }
        }
        if !odometer(&mut v, gf.p()) {
            break;
        }
    }
    let points: Vec<Point> = set
        .into_iter()
        .enumerate()
        .map(|(id, coords)| Point {
            id: id as PointId,
            coords,
        })
        .collect();
    let pid = points
        .iter()
        .map(|p| (p.coords.clone(), p.id))
        .collect::<HashMap<_, _>>();
    (points, pid)
}

/// Advance `v` to the next vector in lexicographic order (rightmost digit
/// fastest). Returns false after wrapping past the last vector.
fn odometer(v: &mut [u8], p: u8) -> bool {
    for digit in v.iter_mut().rev() {
        *digit += 1;
        if *digit < p {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Enumerate lines as sorted point-id sets, returned in lexicographic order
/// (which defines the canonical line ids).
fn enumerate_lines(
    params: SpaceParams,
    gf: &Gf,
    points: &[Point],
    pid: &HashMap<Vec<u8>, PointId>,
) -> Vec<Vec<PointId>> {
    let p = gf.p();
    let mut set: BTreeSet<Vec<PointId>> = BTreeSet::new();
    match params.kind {
        Kind::Projective => {
            for (i, a) in points.iter().enumerate() {
                for b in &points[i + 1..] {
                    let mut pts = BTreeSet::new();
                    for lam in 0..p {
                        for mu in 0..p {
                            if lam == 0 && mu == 0 {
                                continue;
                            }
                            let v: Vec<u8> = a
                                .coords
                                .iter()
                                .zip(&b.coords)
                                .map(|(&x, &y)| gf.add(gf.mul(lam, x), gf.mul(mu, y)))
                                .collect();
                            if let Some(nv) = gf.normalize(&v) {
                                pts.insert(pid[&nv]);
                            }
                        }
                    }
                    set.insert(pts.into_iter().collect());
                }
            }
        }
        Kind::Affine => {
            let vlen = params.n as usize;
            let mut d = vec![0u8; vlen];
            let mut dirs = Vec::new();
            loop {
                if let Some(nd) = gf.normalize(&d) {
                    if nd == d {
                        dirs.push(nd);
                    }
                }
                if !odometer(&mut d, p) {
                    break;
                }
            }
            for base in points {
                for dir in &dirs {
                    let mut pts = BTreeSet::new();
                    for t in 0..p {
                        let v: Vec<u8> = base
                            .coords
                            .iter()
                            .zip(dir)
                            .map(|(&x, &dx)| gf.add(x, gf.mul(t, dx)))
                            .collect();
                        pts.insert(pid[&v]);
                    }
                    set.insert(pts.into_iter().collect());
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Affine direction classes: canonical (normalized) direction vector per
/// line, interned into class ids. Classes must partition the line set into
/// groups of q^(n-1).
fn direction_classes(gf: &Gf, points: &[Point], lines: &[Line]) -> (Vec<u32>, Vec<Vec<u8>>) {
    let mut dirs: Vec<Vec<u8>> = Vec::new();
    let mut index: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut line_dir = Vec::with_capacity(lines.len());
    for line in lines {
        let a = &points[line.basis.0 as usize].coords;
        let b = &points[line.basis.1 as usize].coords;
        let d: Vec<u8> = b.iter().zip(a).map(|(&y, &x)| gf.sub(y, x)).collect();
        let nd = gf.normalize(&d).expect("distinct basis points");
        let id = *index.entry(nd.clone()).or_insert_with(|| {
            dirs.push(nd);
            (dirs.len() - 1) as u32
        });
        line_dir.push(id);
    }
    let mut class_sizes = vec![0u64; dirs.len()];
    for &d in &line_dir {
        class_sizes[d as usize] += 1;
    }
    let expect = (points.len() / gf.p() as usize) as u64;
    for size in class_sizes {
        assert_eq!(size, expect, "parallel class size");
    }
    (line_dir, dirs)
}

fn meet_table(params: SpaceParams, lines: &[Line], line_dir: &[u32]) -> Vec<i32> {
    let l = lines.len();
    let mut meets = vec![MEET_SKEW; l * l];
    for a in 0..l {
        meets[a * l + a] = MEET_EQUAL;
        for b in a + 1..l {
            let common = intersect_sorted(&lines[a].points, &lines[b].points);
            let cell = match common[..] {
                [] => match params.kind {
                    Kind::Affine if line_dir[a] == line_dir[b] => MEET_PARALLEL,
                    _ => MEET_SKEW,
                },
                [p] => p as i32,
                _ => unreachable!("two distinct lines share at most one point"),
            };
            meets[a * l + b] = cell;
            meets[b * l + a] = cell;
        }
    }
    meets
}

fn intersect_sorted(a: &[PointId], b: &[PointId]) -> Vec<PointId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

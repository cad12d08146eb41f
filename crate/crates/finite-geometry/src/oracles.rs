use crate::space::{Kind, MeetResult, PointId, Space};
use crate::{GeometryError, LineId, Result};

/// Classification of an ordered line triple, invariant under argument order.
///
/// `Triangle`: three distinct lines meeting pairwise in three distinct
/// points (necessarily coplanar in 3-space). `ConcurrentNonCoplanar`: three
/// distinct lines through one common point not contained in a plane.
/// `Degenerate`: a repeated line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripleClass {
    Triangle,
    ConcurrentNonCoplanar,
    ConcurrentCoplanar,
    NotPairwiseMeeting,
    Degenerate,
}

impl Space {
    /// True iff the three lines are pairwise distinct and share a common point.
    pub fn oracle_concurrent(&self, a: LineId, b: LineId, c: LineId) -> bool {
        if a == b || a == c || b == c {
            return false;
        }
        match self.meet(a, b) {
            MeetResult::Point(p) => self.line(c).points.binary_search(&p).is_ok(),
            _ => false,
        }
    }

    /// True iff both pairs meet in a point and the two meet points differ.
    pub fn oracle_meet_diff(&self, a1: LineId, b1: LineId, a2: LineId, b2: LineId) -> bool {
        match (self.meet(a1, b1), self.meet(a2, b2)) {
            (MeetResult::Point(p1), MeetResult::Point(p2)) => p1 != p2,
            _ => false,
        }
    }

    /// True iff the two lines span a flat of dimension at most 2
    /// (equal lines count as coplanar).
    pub fn oracle_coplanar(&self, a: LineId, b: LineId) -> bool {
        if a == b {
            return true;
        }
        self.oracle_span_dim(&[a, b]).map_or(false, |d| d <= 2)
    }

    /// Dimension of the smallest flat containing all the listed lines
    /// (projective dimension, or affine dimension of the affine hull).
    pub fn oracle_span_dim(&self, lines: &[LineId]) -> Result<u32> {
        if lines.is_empty() {
            return Err(GeometryError::EmptyList);
        }
        for &l in lines {
            self.check_line(l)?;
        }
        let gf = self.gf();
        match self.params().kind {
            Kind::Projective => {
                let mut rows = Vec::new();
                for &l in lines {
                    let (u, v) = self.line(l).basis;
                    rows.push(self.point(u).coords.clone());
                    rows.push(self.point(v).coords.clone());
                }
                Ok(gf.rank(rows) as u32 - 1)
            }
            Kind::Affine => {
                let (u0, _) = self.line(lines[0]).basis;
                let base = self.point(u0).coords.clone();
                let mut rows = Vec::new();
                for &l in lines {
                    let (u, v) = self.line(l).basis;
                    for p in [u, v] {
                        let row: Vec<u8> = self
                            .point(p)
                            .coords
                            .iter()
                            .zip(&base)
                            .map(|(&x, &b)| gf.sub(x, b))
                            .collect();
                        rows.push(row);
                    }
                }
                Ok(gf.rank(rows) as u32)
            }
        }
    }

    /// Classify a line triple; see [`TripleClass`].
    pub fn oracle_classify3(&self, a: LineId, b: LineId, c: LineId) -> TripleClass {
        if a == b || a == c || b == c {
            return TripleClass::Degenerate;
        }
        let (mab, mac, mbc) = (self.meet(a, b), self.meet(a, c), self.meet(b, c));
        let (pab, pac, pbc) = match (mab.point(), mac.point(), mbc.point()) {
            (Some(x), Some(y), Some(z)) => (x, y, z),
            _ => return TripleClass::NotPairwiseMeeting,
        };
        if pab == pac && pab == pbc {
            if self.oracle_span_dim(&[a, b, c]).unwrap() <= 2 {
                TripleClass::ConcurrentCoplanar
            } else {
                TripleClass::ConcurrentNonCoplanar
            }
        } else {
            // Two equal meet points would force two of the lines to share two
            // points, contradicting distinctness; so all three differ.
            debug_assert!(pab != pac && pab != pbc && pac != pbc);
            TripleClass::Triangle
        }
    }

    /// Vertex of a concurrent non-coplanar triple.
    pub fn oracle_tripod_vertex(&self, a: LineId, b: LineId, c: LineId) -> Result<PointId> {
        if self.oracle_classify3(a, b, c) != TripleClass::ConcurrentNonCoplanar {
            return Err(GeometryError::WrongClass);
        }
        Ok(self.meet(a, b).point().expect("concurrent lines meet"))
    }

    /// Sorted point set of the unique plane carrying a triangle triple.
    pub fn oracle_trilateral_plane(&self, a: LineId, b: LineId, c: LineId) -> Result<Vec<PointId>> {
        if self.oracle_classify3(a, b, c) != TripleClass::Triangle {
            return Err(GeometryError::WrongClass);
        }
        let gf = self.gf();
        let pab = self.meet(a, b).point().unwrap();
        let pac = self.meet(a, c).point().unwrap();
        let pbc = self.meet(b, c).point().unwrap();
        let (va, vb, vc) = (
            self.point(pab).coords.clone(),
            self.point(pac).coords.clone(),
            self.point(pbc).coords.clone(),
        );
        let p = gf.p();
        let mut out: Vec<PointId> = Vec::new();
        match self.params().kind {
            Kind::Projective => {
                // All normalized combinations of the three (independent)
                // meet points.
                for la in 0..p {
                    for lb in 0..p {
                        for lc in 0..p {
                            if la == 0 && lb == 0 && lc == 0 {
                                continue;
                            }
                            let v: Vec<u8> = (0..va.len())
                                .map(|i| {
                                    gf.add(
                                        gf.add(gf.mul(la, va[i]), gf.mul(lb, vb[i])),
                                        gf.mul(lc, vc[i]),
                                    )
                                })
                                .collect();
                            let nv = gf.normalize(&v).unwrap();
                            out.push(self.point_id_of(&nv));
                        }
                    }
                }
            }
            Kind::Affine => {
                // Affine plane through pab spanned by the two edge directions.
                let d1: Vec<u8> = vb.iter().zip(&va).map(|(&x, &y)| gf.sub(x, y)).collect();
                let d2: Vec<u8> = vc.iter().zip(&va).map(|(&x, &y)| gf.sub(x, y)).collect();
                for s in 0..p {
                    for t in 0..p {
                        let v: Vec<u8> = (0..va.len())
                            .map(|i| gf.add(va[i], gf.add(gf.mul(s, d1[i]), gf.mul(t, d2[i]))))
                            .collect();
                        out.push(self.point_id_of(&v));
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn point_id_of(&self, coords: &[u8]) -> PointId {
        // Interior helper for carrier computation; linear scan is fine at
        // desk scale and avoids holding a second index.
        (0..self.point_count() as PointId)
            .find(|&i| self.point(i).coords == coords)
            .expect("coordinates of a constructed point")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn pg32() -> Space {
        Space::build(Kind::Projective, 3, 2).unwrap()
    }

    #[test]
    fn concurrency_matches_meet_points() {
        let s = pg32();
        let l = s.line_count() as LineId;
        let mut seen_true = false;
        for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    let expect = a != b
                        && a != c
                        && b != c
                        && match (s.meet(a, b).point(), s.meet(a, c).point(), s.meet(b, c).point())
                        {
                            (Some(x), Some(y), Some(z)) => x == y && y == z,
                            _ => false,
                        };
                    assert_eq!(s.oracle_concurrent(a, b, c), expect);
                    seen_true |= expect;
                }
            }
        }
        assert!(seen_true);
    }

    #[test]
    fn repeated_lines_are_never_concurrent() {
        let s = pg32();
        assert!(!s.oracle_concurrent(0, 0, 1));
        assert!(!s.oracle_concurrent(0, 1, 1));
    }

    #[test]
    fn meet_diff_requires_two_meet_points() {
        let s = pg32();
        // Lines 0 and 1 share point 0; a pair with itself has equal meets.
        assert!(!s.oracle_meet_diff(0, 1, 0, 1));
        // Find two pairs with distinct meet points.
        let l = s.line_count() as LineId;
        let mut found = false;
        'outer: for a in 0..l {
            for b in 0..l {
                if let Some(p) = s.meet(a, b).point() {
                    for c in 0..l {
                        for d in 0..l {
                            if let Some(q) = s.meet(c, d).point() {
                                if p != q {
                                    assert!(s.oracle_meet_diff(a, b, c, d));
                                    found = true;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn span_dims_for_simple_configurations() {
        let s = pg32();
        assert_eq!(s.oracle_span_dim(&[0]).unwrap(), 1);
        let l = s.line_count() as LineId;
        for a in 0..l {
            for b in a + 1..l {
                let d = s.oracle_span_dim(&[a, b]).unwrap();
                match s.meet(a, b) {
                    MeetResult::Point(_) => assert_eq!(d, 2),
                    MeetResult::Skew => assert_eq!(d, 3),
                    _ => unreachable!(),
                }
            }
        }
        assert_eq!(s.oracle_span_dim(&[]).unwrap_err(), GeometryError::EmptyList);
    }

    #[test]
    fn affine_span_dims() {
        let s = Space::build(Kind::Affine, 3, 3).unwrap();
        let l = s.line_count() as LineId;
        for a in 0..l {
            assert_eq!(s.oracle_span_dim(&[a]).unwrap(), 1);
            for b in a + 1..l {
                let d = s.oracle_span_dim(&[a, b]).unwrap();
                match s.meet(a, b) {
                    MeetResult::Point(_) | MeetResult::Parallel => assert_eq!(d, 2),
                    MeetResult::Skew => assert_eq!(d, 3),
                    MeetResult::Equal => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn classify_is_argument_order_invariant() {
        let s = pg32();
        let l = s.line_count() as LineId;
        for a in (0..l).step_by(3) {
            for b in (0..l).step_by(5) {
                for c in (0..l).step_by(7) {
                    let base = s.oracle_classify3(a, b, c);
                    for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        assert_eq!(s.oracle_classify3(x, y, z), base);
                    }
                }
            }
        }
    }

    #[test]
    fn classify_counts_in_pg32() {
        // Unordered triple census of PG(3,2): 105 concurrent-coplanar,
        // 420 tripods, 420 triangles, the rest not pairwise meeting.
        let s = pg32();
        let l = s.line_count() as LineId;
        let mut counts = std::collections::HashMap::new();
        for a in 0..l {
            for b in a + 1..l {
                for c in b + 1..l {
                    *counts.entry(s.oracle_classify3(a, b, c)).or_insert(0u32) += 1;
                }
            }
        }
        assert_eq!(counts[&TripleClass::ConcurrentCoplanar], 105);
        assert_eq!(counts[&TripleClass::ConcurrentNonCoplanar], 420);
        assert_eq!(counts[&TripleClass::Triangle], 420);
        assert_eq!(
            counts.values().sum::<u32>(),
            35 * 34 * 33 / 6,
            "all unordered triples counted"
        );
    }

    #[test]
    fn carriers_for_both_triple_kinds() {
        let s = pg32();
        let l = s.line_count() as LineId;
        let mut saw_tripod = false;
        let mut saw_triangle = false;
        for a in 0..l {
            for b in a + 1..l {
                for c in b + 1..l {
                    match s.oracle_classify3(a, b, c) {
                        TripleClass::ConcurrentNonCoplanar if !saw_tripod => {
                            let v = s.oracle_tripod_vertex(a, b, c).unwrap();
                            for line in [a, b, c] {
                                assert!(s.line(line).points.binary_search(&v).is_ok());
                            }
                            assert_eq!(
                                s.oracle_trilateral_plane(a, b, c).unwrap_err(),
                                GeometryError::WrongClass
                            );
                            saw_tripod = true;
                        }
                        TripleClass::Triangle if !saw_triangle => {
                            let plane = s.oracle_trilateral_plane(a, b, c).unwrap();
                            // A projective plane of order 2 has 7 points and
                            // contains all three lines entirely.
                            assert_eq!(plane.len(), 7);
                            for line in [a, b, c] {
                                for p in &s.line(line).points.clone() {
                                    assert!(plane.binary_search(p).is_ok());
                                }
                            }
                            assert_eq!(
                                s.oracle_tripod_vertex(a, b, c).unwrap_err(),
                                GeometryError::WrongClass
                            );
                            saw_triangle = true;
                        }
                        _ => {}
                    }
                }
            }
        }
        assert!(saw_tripod && saw_triangle);
    }

    #[test]
    fn affine_trilateral_plane_has_q_squared_points() {
        let s = Space::build(Kind::Affine, 3, 3).unwrap();
        let l = s.line_count() as LineId;
        'outer: for a in 0..l {
            for b in 0..l {
                for c in 0..l {
                    if s.oracle_classify3(a, b, c) == TripleClass::Triangle {
                        let plane = s.oracle_trilateral_plane(a, b, c).unwrap();
                        assert_eq!(plane.len(), 9);
                        break 'outer;
                    }
                }
            }
        }
    }
}

use crate::GeometryError;

/// GF(p) for a prime `p` in `2..=13`, with precomputed inverses.
///
/// Elements are residues `0..p` stored as `u8`. The supported range covers
/// every model this workspace builds; keeping it narrow lets the inverse
/// table live inline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf {
    p: u8,
    inv: [u8; 14],
}

impl Gf {
    pub fn new(p: u32) -> crate::Result<Self> {
        if !(2..=13).contains(&p) || !is_prime(p) {
            return Err(GeometryError::NonPrimeField(p));
        }
        let p8 = p as u8;
        let mut inv = [0u8; 14];
        for a in 1..p8 {
            for b in 1..p8 {
                if (a as u16 * b as u16) % p as u16 == 1 {
                    inv[a as usize] = b;
                }
            }
        }
        Ok(Gf { p: p8, inv })
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0 && a < self.p);
        self.inv[a as usize]
    }

    /// Scale `v` so its first nonzero coordinate becomes 1.
    /// Returns `None` for the zero vector.
    pub fn normalize(&self, v: &[u8]) -> Option<Vec<u8>> {
        let lead = v.iter().position(|&x| x != 0)?;
        let s = self.inv(v[lead]);
        Some(v.iter().map(|&x| self.mul(x, s)).collect())
    }

    /// Rank of a matrix given as rows over GF(p). Consumes the row set.
    pub fn rank(&self, mut rows: Vec<Vec<u8>>) -> usize {
        let width = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..width {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let s = self.inv(rows[rank][col]);
            for x in rows[rank].iter_mut() {
                *x = self.mul(*x, s);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..width {
                        let sub = self.mul(f, rows[rank][c]);
                        rows[r][c] = self.sub(rows[r][c], sub);
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).all(|d| n % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primes_and_out_of_range() {
        for bad in [0, 1, 4, 6, 8, 9, 10, 12, 14, 17] {
            assert_eq!(Gf::new(bad), Err(GeometryError::NonPrimeField(bad)));
        }
        for good in [2, 3, 5, 7, 11, 13] {
            assert!(Gf::new(good).is_ok());
        }
    }

    #[test]
    fn every_nonzero_element_has_consistent_inverse() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let f = Gf::new(p).unwrap();
            for a in 1..p as u8 {
                assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn normalize_makes_lead_coordinate_one() {
        let f = Gf::new(3).unwrap();
        assert_eq!(f.normalize(&[0, 2, 1]), Some(vec![0, 1, 2]));
        assert_eq!(f.normalize(&[2, 2, 2]), Some(vec![1, 1, 1]));
        assert_eq!(f.normalize(&[0, 0, 0]), None);
    }

    #[test]
    fn rank_of_known_matrices() {
        let f = Gf::new(2).unwrap();
        assert_eq!(f.rank(vec![vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(f.rank(vec![vec![1, 1], vec![1, 1]]), 1);
        let f3 = Gf::new(3).unwrap();
        // Second row is twice the first.
        assert_eq!(f3.rank(vec![vec![1, 2, 0], vec![2, 1, 0]]), 1);
        assert_eq!(f3.rank(vec![vec![1, 2, 0], vec![2, 1, 1]]), 2);
    }
}

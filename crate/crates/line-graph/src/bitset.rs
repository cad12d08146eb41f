use crate::LineId;

/// A set of lines over a fixed universe, stored as 64-bit words.
///
/// All binary operations require both operands to share the same universe
/// size. Iteration yields ascending line ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineSet {
    universe: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(universe: usize) -> usize {
    universe.div_ceil(64)
}

impl LineSet {
    pub fn empty(universe: usize) -> Self {
        LineSet {
            universe,
            words: vec![0; word_count(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = LineSet {
            universe,
            words: vec![!0u64; word_count(universe)],
        };
        s.trim();
        s
    }

    pub fn from_ids<I: IntoIterator<Item = LineId>>(universe: usize, ids: I) -> Self {
        let mut s = Self::empty(universe);
        for id in ids {
            s.insert(id);
        }
        s
    }

    /// Construct directly from adjacency-row words.
    pub fn from_words(universe: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(universe));
        let mut s = LineSet { universe, words };
        s.trim();
        s
    }

    /// Clear any bits beyond the universe in the last word.
    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn insert(&mut self, id: LineId) {
        debug_assert!((id as usize) < self.universe);
        self.words[id as usize / 64] |= 1u64 << (id as usize % 64);
    }

    #[inline]
    pub fn remove(&mut self, id: LineId) {
        self.words[id as usize / 64] &= !(1u64 << (id as usize % 64));
    }

    #[inline]
    pub fn contains(&self, id: LineId) -> bool {
        (id as usize) < self.universe
            && self.words[id as usize / 64] >> (id as usize % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn and_assign(&mut self, other: &LineSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &LineSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn minus_assign(&mut self, other: &LineSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Intersect with a raw adjacency row.
    pub fn and_words(&mut self, row: &[u64]) {
        debug_assert_eq!(self.words.len(), row.len());
        for (a, b) in self.words.iter_mut().zip(row) {
            *a &= b;
        }
    }

    /// Union with a raw adjacency row.
    pub fn or_words(&mut self, row: &[u64]) {
        debug_assert_eq!(self.words.len(), row.len());
        for (a, b) in self.words.iter_mut().zip(row) {
            *a |= b;
        }
    }

    /// True iff the intersection with a raw adjacency row is non-empty;
    /// allocates nothing.
    pub fn intersects_words(&self, row: &[u64]) -> bool {
        debug_assert_eq!(self.words.len(), row.len());
        self.words.iter().zip(row).any(|(a, b)| a & b != 0)
    }

    /// True iff the two sets share an element.
    pub fn intersects(&self, other: &LineSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.intersects_words(&other.words)
    }

    /// Lowest element of the intersection with a raw row, if any.
    pub fn first_common_with(&self, row: &[u64]) -> Option<LineId> {
        for (i, (a, b)) in self.words.iter().zip(row).enumerate() {
            let w = a & b;
            if w != 0 {
                return Some((i * 64 + w.trailing_zeros() as usize) as LineId);
            }
        }
        None
    }

    /// Lowest id in the set.
    pub fn first(&self) -> Option<LineId> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some((i * 64 + w.trailing_zeros() as usize) as LineId);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = LineId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((i * 64 + bit) as LineId)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_set_has_exact_cardinality() {
        for n in [1usize, 63, 64, 65, 130, 651] {
            let s = LineSet::full(n);
            assert_eq!(s.len(), n);
            assert!(s.is_full());
            assert!(s.contains((n - 1) as LineId));
            assert!(!s.contains(n as LineId));
        }
    }

    #[test]
    fn set_operations_agree_with_model_sets() {
        let a = LineSet::from_ids(100, [1, 5, 64, 70, 99]);
        let b = LineSet::from_ids(100, [5, 64, 80]);
        let mut and = a.clone();
        and.and_assign(&b);
        assert_eq!(and.iter().collect::<Vec<_>>(), vec![5, 64]);
        let mut or = a.clone();
        or.or_assign(&b);
        assert_eq!(or.len(), 6);
        let mut minus = a.clone();
        minus.minus_assign(&b);
        assert_eq!(minus.iter().collect::<Vec<_>>(), vec![1, 70, 99]);
    }

    #[test]
    fn iteration_is_ascending_and_first_matches() {
        let s = LineSet::from_ids(200, [199, 3, 77, 3]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 77, 199]);
        assert_eq!(s.first(), Some(3));
        assert_eq!(LineSet::empty(10).first(), None);
    }
}

use std::collections::HashMap;
use std::hash::{BuildHasher, Hash, RandomState};
use std::sync::{Arc, Mutex, OnceLock};

use crate::{LineId, LineSet};

const SHARDS: usize = 16;

/// Sharded concurrent memo table. Keys are canonicalized by the caller so
/// that argument orders equivalent under a predicate's symmetries share one
/// entry.
pub struct Memo<K, V> {
    hasher: RandomState,
    shards: Vec<Mutex<HashMap<K, V>>>,
}

impl<K: Eq + Hash, V: Clone> Default for Memo<K, V> {
    fn default() -> Self {
        Memo {
            hasher: RandomState::new(),
            shards: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
        }
    }
}

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    fn shard(&self, key: &K) -> &Mutex<HashMap<K, V>> {
        let h = self.hasher.hash_one(key) as usize;
        &self.shards[h % SHARDS]
    }

    pub fn get(&self, key: &K) -> Option<V> {
        self.shard(key).lock().unwrap().get(key).cloned()
    }

    pub fn insert(&self, key: K, value: V) {
        self.shard(&key).lock().unwrap().insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.shards.iter().map(|s| s.lock().unwrap().len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A dense `count × count` table of bit rows over the line universe: entry
/// `(a, b)` is a full row of `count` bits. Used to precompute a ternary
/// relation `R(a, b, ·)` once and then answer row queries with no further
/// relation reads.
pub struct BitCube {
    count: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitCube {
    pub fn new(count: usize) -> Self {
        let words = count.div_ceil(64);
        BitCube {
            count,
            words,
            bits: vec![0u64; count * count * words],
        }
    }

    /// Approximate heap footprint, for choosing dense vs. sparse caching.
    pub fn byte_size(count: usize) -> usize {
        count * count * count.div_ceil(64) * 8
    }

    #[inline]
    fn base(&self, a: LineId, b: LineId) -> usize {
        (a as usize * self.count + b as usize) * self.words
    }

    #[inline]
    pub fn set(&mut self, a: LineId, b: LineId, c: LineId) {
        let base = self.base(a, b);
        self.bits[base + c as usize / 64] |= 1u64 << (c as usize % 64);
    }

    /// Sets the bit under every permutation of the three arguments.
    pub fn set_sym(&mut self, a: LineId, b: LineId, c: LineId) {
        for (x, y, z) in [
            (a, b, c),
            (a, c, b),
            (b, a, c),
            (b, c, a),
            (c, a, b),
            (c, b, a),
        ] {
            self.set(x, y, z);
        }
    }

    #[inline]
    pub fn get(&self, a: LineId, b: LineId, c: LineId) -> bool {
        let base = self.base(a, b);
        self.bits[base + c as usize / 64] >> (c as usize % 64) & 1 == 1
    }

    /// The row `{c : R(a, b, c)}` as raw words.
    #[inline]
    pub fn row(&self, a: LineId, b: LineId) -> &[u64] {
        let base = self.base(a, b);
        &self.bits[base..base + self.words]
    }

    pub fn row_set(&self, a: LineId, b: LineId) -> LineSet {
        LineSet::from_words(self.count, self.row(a, b).to_vec())
    }
}

/// Shared caches threaded through predicate evaluation. One instance per
/// model; everything inside is keyed canonically so results are reused
/// across argument orders that a predicate cannot distinguish.
#[derive(Default)]
pub struct PredicateTable {
    /// Dense co-punctuality cube, populated once for small universes.
    pub s_cube: OnceLock<BitCube>,
    /// Sparse point-query fallback for the same ternary relation.
    pub s_map: Memo<[LineId; 3], bool>,
    /// Rows `{c : S(a, b, c)}` for large universes where the dense cube
    /// would not fit, keyed by sorted pair.
    pub s_rows: Memo<(LineId, LineId), Arc<LineSet>>,
    /// The rows above closed under the two defining lines themselves,
    /// keyed by sorted pair.
    pub sbar_sets: Memo<(LineId, LineId), Arc<LineSet>>,
    /// Four-argument crossing predicate, canonical key.
    pub hash: Memo<[LineId; 4], bool>,
    /// Ternary carrier predicate, keyed by sorted triple.
    pub t3: Memo<[LineId; 3], bool>,
    pub equiv_plus: Memo<[LineId; 6], bool>,
    pub equiv_minus: Memo<[LineId; 6], bool>,
    pub equiv_oplus: Memo<[LineId; 6], bool>,
    /// Cached outcome of the big-clique existence predicate for this
    /// model, with a witness family when one exists.
    pub clique_fact: OnceLock<(bool, Vec<LineId>)>,
}

impl PredicateTable {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Sorted-triple key for fully symmetric ternary predicates.
pub fn key3(a: LineId, b: LineId, c: LineId) -> [LineId; 3] {
    let mut k = [a, b, c];
    k.sort_unstable();
    k
}

/// Canonical key for the four-argument pair predicate: each pair sorted
/// internally, then the two pairs sorted against each other. Matches its
/// invariances (swap within either pair, swap the pairs).
pub fn key_pairs(a1: LineId, b1: LineId, a2: LineId, b2: LineId) -> [LineId; 4] {
    let mut p = [a1.min(b1), a1.max(b1)];
    let mut q = [a2.min(b2), a2.max(b2)];
    if q < p {
        std::mem::swap(&mut p, &mut q);
    }
    [p[0], p[1], q[0], q[1]]
}

/// Canonical key for triple-pair predicates symmetric within each triple
/// and under swapping the triples.
pub fn key_triples_sym(t1: [LineId; 3], t2: [LineId; 3]) -> [LineId; 6] {
    let mut p = t1;
    let mut q = t2;
    p.sort_unstable();
    q.sort_unstable();
    if q < p {
        std::mem::swap(&mut p, &mut q);
    }
    [p[0], p[1], p[2], q[0], q[1], q[2]]
}

/// Canonical key for triple-pair predicates symmetric within each triple
/// but **not** under swapping the triples (the first triple plays a
/// distinguished role).
pub fn key_triples_ordered(t1: [LineId; 3], t2: [LineId; 3]) -> [LineId; 6] {
    let mut p = t1;
    let mut q = t2;
    p.sort_unstable();
    q.sort_unstable();
    [p[0], p[1], p[2], q[0], q[1], q[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memo_round_trips_values() {
        let memo: Memo<(LineId, LineId), u32> = Memo::new();
        assert!(memo.get(&(1, 2)).is_none());
        memo.insert((1, 2), 99);
        assert_eq!(memo.get(&(1, 2)), Some(99));
        assert_eq!(memo.len(), 1);
    }

    #[test]
    fn bit_cube_row_matches_point_queries() {
        let mut cube = BitCube::new(70);
        cube.set_sym(3, 5, 68);
        cube.set(3, 5, 1);
        assert!(cube.get(3, 5, 68));
        assert!(cube.get(68, 5, 3), "symmetric set covers all orders");
        assert!(!cube.get(5, 1, 3), "plain set covers one order only");
        let row = cube.row_set(3, 5);
        assert_eq!(row.iter().collect::<Vec<_>>(), vec![1, 68]);
    }

    #[test]
    fn pair_key_is_invariant_under_pair_symmetries() {
        let base = key_pairs(4, 9, 2, 7);
        assert_eq!(key_pairs(9, 4, 2, 7), base);
        assert_eq!(key_pairs(4, 9, 7, 2), base);
        assert_eq!(key_pairs(2, 7, 4, 9), base);
        assert_eq!(base, [2, 7, 4, 9]);
    }

    #[test]
    fn triple_keys_distinguish_ordered_from_symmetric() {
        let t1 = [9, 1, 5];
        let t2 = [0, 8, 2];
        assert_eq!(
            key_triples_sym(t1, t2),
            key_triples_sym(t2, t1),
            "symmetric key ignores triple order"
        );
        assert_ne!(
            key_triples_ordered(t1, t2),
            key_triples_ordered(t2, t1),
            "ordered key keeps the first triple first"
        );
        assert_eq!(key_triples_ordered(t1, t2), [1, 5, 9, 0, 2, 8]);
    }
}

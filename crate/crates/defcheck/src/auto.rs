//! Exact order of the adjacency-preserving permutation group of a line
//! model: depth-first image assignment over degree-compatible candidates,
//! with the partial map's adjacency constraints narrowing each level.

use anyhow::{bail, Result};
use line_graph::IntersectionModel;

/// Largest model the counter accepts; adjacency rows are single machine
/// words below this bound, and the search stays desk-scale.
pub const AUTO_VERTEX_CAP: usize = 64;

/// Number of adjacency-preserving permutations of the model's lines.
pub fn automorphism_count(model: &IntersectionModel) -> Result<u64> {
    let n = model.line_count();
    if n > AUTO_VERTEX_CAP {
        bail!("model has {n} lines, above the automorphism cap of {AUTO_VERTEX_CAP}");
    }
    let mut adj = vec![0u64; n];
    for a in 0..n {
        for b in 0..n {
            if model.sim(a as u16, b as u16) {
                adj[a] |= 1 << b;
            }
        }
    }
    Ok(automorphism_count_adj(n, &adj))
}

/// The same count over a raw adjacency given as bitmask rows.
pub fn automorphism_count_adj(n: usize, adj: &[u64]) -> u64 {
    assert!(n <= AUTO_VERTEX_CAP && adj.len() == n);
    let full: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    // Candidate images must match on degree; group the vertex set by it.
    let mut deg_mask = vec![0u64; 65];
    for (v, row) in adj.iter().enumerate() {
        deg_mask[row.count_ones() as usize] |= 1 << v;
    }
    let mut perm = vec![0usize; n];
    count_from(0, 0, full, adj, &deg_mask, &mut perm)
}

fn count_from(
    depth: usize,
    used: u64,
    full: u64,
    adj: &[u64],
    deg_mask: &[u64],
    perm: &mut [usize],
) -> u64 {
    let n = adj.len();
    if depth == n {
        return 1;
    }
    // Images of `depth` must be unused, of equal degree, and adjacent to
    // exactly the images of the vertices `depth` is adjacent to.
    let mut cands = full & !used & deg_mask[adj[depth].count_ones() as usize];
    for (j, &image) in perm.iter().enumerate().take(depth) {
        if cands == 0 {
            return 0;
        }
        if adj[depth] >> j & 1 == 1 {
            cands &= adj[image];
        } else {
            cands &= !adj[image];
        }
    }
    let mut total = 0;
    while cands != 0 {
        let img = cands.trailing_zeros() as usize;
        cands &= cands - 1;
        perm[depth] = img;
        total += count_from(depth + 1, used | 1 << img, full, adj, deg_mask, perm);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use finite_geometry::{Kind, Space};

    #[test]
    fn a_three_vertex_path_has_one_nontrivial_symmetry() {
        // 0 - 1 - 2: identity and the end swap.
        let adj = [0b010, 0b101, 0b010];
        assert_eq!(automorphism_count_adj(3, &adj), 2);
    }

    #[test]
    fn an_edgeless_triple_has_the_full_symmetric_group() {
        assert_eq!(automorphism_count_adj(3, &[0, 0, 0]), 6);
    }

    #[test]
    fn a_complete_quadruple_has_the_full_symmetric_group() {
        let adj = [0b1110, 0b1101, 0b1011, 0b0111];
        assert_eq!(automorphism_count_adj(4, &adj), 24);
    }

    #[test]
    fn the_smallest_projective_line_model_is_twice_the_collineation_group() {
        let space = Space::build(Kind::Projective, 3, 2).unwrap();
        let model = IntersectionModel::from_space(&space);
        assert_eq!(automorphism_count(&model).unwrap(), 40320);
    }

    #[test]
    fn oversized_models_are_refused() {
        let space = Space::build(Kind::Affine, 3, 3).unwrap();
        let model = IntersectionModel::from_space(&space);
        assert!(automorphism_count(&model).is_err());
    }
}

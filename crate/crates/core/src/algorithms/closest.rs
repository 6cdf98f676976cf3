//! Closest feasible permutation to a reference order.
//!
//! Given disjoint blocks that must each stay contiguous, find the block order
//! and per-block internal order that minimize the Kendall tau distance to the
//! reference. Internal and cross-block inversions are independent, so each
//! block's internal order is fixed first and the block order is found by an
//! exact dynamic program over subsets (a linear ordering problem).

use crate::error::{Error, Result};
use crate::instance::{ComponentPartition, Model};
use crate::perm::{count_inversions, pairs, NodeId, Permutation};

/// Largest block count accepted by the subset dynamic program.
pub const DEFAULT_ITEM_CAP: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closest {
    pub perm: Permutation,
    /// Kendall tau distance from the reference.
    pub distance: u64,
}

/// Internal order of a block that stays contiguous.
#[derive(Clone, Debug)]
pub enum BlockShape<'a> {
    /// Any internal order is allowed (a clique).
    Free(&'a [NodeId]),
    /// Path order or its reverse (a line).
    Path(&'a [NodeId]),
    /// Exactly this order.
    Fixed(Vec<NodeId>),
}

/// Best internal order of one block and its internal inversion count.
/// Ties between path orientations go to the one with the smaller first node.
pub fn best_internal_order(reference: &Permutation, shape: BlockShape<'_>) -> (Vec<NodeId>, u64) {
    match shape {
        BlockShape::Free(nodes) => {
            let mut order = nodes.to_vec();
            order.sort_unstable_by_key(|&v| reference.pos_of(v));
            (order, 0)
        }
        BlockShape::Path(path) => {
            let mut pos: Vec<usize> = path.iter().map(|&v| reference.pos_of(v)).collect();
            let forward = count_inversions(&mut pos);
            let backward = pairs(path.len() as u64) - forward;
            let reversed_wins = backward < forward
                || (backward == forward && path.len() > 1 && path[path.len() - 1] < path[0]);
            let mut order = path.to_vec();
            if reversed_wins {
                order.reverse();
                (order, backward)
            } else {
                (order, forward)
            }
        }
        BlockShape::Fixed(order) => {
            let mut pos: Vec<usize> = order.iter().map(|&v| reference.pos_of(v)).collect();
            let inv = count_inversions(&mut pos);
            (order, inv)
        }
    }
}

/// `weights[a][b]`: reference inversions paid by placing block `a` before
/// block `b`, i.e. pairs `(x in a, y in b)` with `y` before `x` in the
/// reference.
pub fn cross_weights(reference: &Permutation, blocks: &[Vec<NodeId>]) -> Vec<Vec<u64>> {
    let m = blocks.len();
    let mut block_of = vec![usize::MAX; reference.len()];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            block_of[v] = i;
        }
    }
    let mut weights = vec![vec![0u64; m]; m];
    let order = reference.as_slice();
    // counts[b] = nodes of block b seen so far in reference order
    let mut counts = vec![0u64; m];
    for &y in order {
        let by = block_of[y];
        if by == usize::MAX {
            continue;
        }
        // every earlier x of block a != by forms a pair inverted by "by before a"
        for (a, &c) in counts.iter().enumerate() {
            if a != by {
                weights[by][a] += c;
            }
        }
        counts[by] += 1;
    }
    weights
}

/// Minimum-cost block order. Ties go to the order whose sequence of block
/// keys is lexicographically smallest.
pub fn order_blocks(weights: &[Vec<u64>], keys: &[NodeId], cap: usize) -> Result<(Vec<usize>, u64)> {
    let m = weights.len();
    if m > cap {
        return Err(Error::Capacity {
            what: "closest-permutation search",
            items: m,
            cap,
        });
    }
    if m == 0 {
        return Ok((Vec::new(), 0));
    }
    let full: usize = (1 << m) - 1;

    // before[j][S] = sum over i in S of weights[i][j], split into two halves
    let lo_bits = m / 2;
    let hi_bits = m - lo_bits;
    let lo_mask = (1usize << lo_bits) - 1;
    let half_table = |offset: usize, bits: usize| -> Vec<Vec<u64>> {
        (0..m)
            .map(|j| {
                let mut t = vec![0u64; 1 << bits];
                for s in 1..(1usize << bits) {
                    let low = s.trailing_zeros() as usize;
                    t[s] = t[s & (s - 1)] + weights[offset + low][j];
                }
                t
            })
            .collect()
    };
    let lo = half_table(0, lo_bits);
    let hi = half_table(lo_bits, hi_bits);
    let before = |s: usize, j: usize| lo[j][s & lo_mask] + hi[j][s >> lo_bits];

    // rest[S] = cheapest cost of appending all blocks outside S after S
    let mut rest = vec![u64::MAX; full + 1];
    rest[full] = 0;
    for s in (0..full).rev() {
        let mut best = u64::MAX;
        let mut free = full & !s;
        while free != 0 {
            let j = free.trailing_zeros() as usize;
            free &= free - 1;
            let c = before(s, j) + rest[s | (1 << j)];
            best = best.min(c);
        }
        rest[s] = best;
    }

    let mut order = Vec::with_capacity(m);
    let mut s = 0usize;
    while s != full {
        let mut pick: Option<usize> = None;
        let mut free = full & !s;
        while free != 0 {
            let j = free.trailing_zeros() as usize;
            free &= free - 1;
            if before(s, j) + rest[s | (1 << j)] == rest[s]
                && pick.is_none_or(|p| keys[j] < keys[p])
            {
                pick = Some(j);
            }
        }
        let j = pick.expect("some block attains the minimum");
        order.push(j);
        s |= 1 << j;
    }
    Ok((order, rest[0]))
}

/// Closest permutation to `reference` in which every block stays contiguous
/// with an allowed internal order.
pub fn closest_with_blocks(reference: &Permutation, shapes: Vec<BlockShape<'_>>, cap: usize) -> Result<Closest> {
    let mut internal = 0u64;
    let blocks: Vec<Vec<NodeId>> = shapes
        .into_iter()
        .map(|shape| {
            let (order, inv) = best_internal_order(reference, shape);
            internal += inv;
            order
        })
        .collect();
    let weights = cross_weights(reference, &blocks);
    let keys: Vec<NodeId> = blocks.iter().map(|b| b[0]).collect();
    let (order, cross) = order_blocks(&weights, &keys, cap)?;
    let node_at: Vec<NodeId> = order.iter().flat_map(|&i| blocks[i].iter().copied()).collect();
    Ok(Closest {
        perm: Permutation::from_order(node_at)?,
        distance: internal + cross,
    })
}

/// Closest minimum linear arrangement of `parts` to `reference`.
pub fn closest_minla(reference: &Permutation, parts: &ComponentPartition, cap: usize) -> Result<Closest> {
    let shapes = parts
        .components()
        .map(|c| match parts.model() {
            Model::Cliques => BlockShape::Free(parts.members(c)),
            Model::Lines => BlockShape::Path(parts.members(c)),
        })
        .collect();
    closest_with_blocks(reference, shapes, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::kendall_tau;

    #[test]
    fn weights_count_inverted_pairs() {
        let reference = Permutation::from_order(vec![0, 1, 2, 3]).unwrap();
        let blocks = vec![vec![0, 3], vec![1, 2]];
        let w = cross_weights(&reference, &blocks);
        // {0,3} before {1,2}: pairs (3,1), (3,2) inverted
        assert_eq!(w[0][1], 2);
        assert_eq!(w[1][0], 2);
    }

    #[test]
    fn order_blocks_breaks_ties_by_key() {
        let w = vec![vec![0, 1], vec![1, 0]];
        let (order, cost) = order_blocks(&w, &[5, 2], 22).unwrap();
        assert_eq!((order, cost), (vec![1, 0], 1));
    }

    #[test]
    fn capacity_error() {
        let w = vec![vec![0; 3]; 3];
        assert!(matches!(
            order_blocks(&w, &[0, 1, 2], 2),
            Err(Error::Capacity { items: 3, cap: 2, .. })
        ));
    }

    #[test]
    fn distance_matches_kendall() {
        let reference = Permutation::from_order(vec![4, 0, 3, 1, 5, 2]).unwrap();
        let shapes = vec![
            BlockShape::Path(&[0, 1, 2]),
            BlockShape::Free(&[3, 5]),
            BlockShape::Fixed(vec![4]),
        ];
        let c = closest_with_blocks(&reference, shapes, 22).unwrap();
        assert_eq!(kendall_tau(&reference, &c.perm).unwrap(), c.distance);
    }
}

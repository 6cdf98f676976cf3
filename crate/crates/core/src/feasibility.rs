//! Arrangement cost and the contiguity characterization of optimal
//! arrangements for clique and line collections.

use crate::instance::{ComponentPartition, Model};
use crate::perm::Permutation;

/// Sum of `|pos(x) - pos(y)|` over the edges of the revealed graph.
pub fn arrangement_cost(p: &Permutation, parts: &ComponentPartition) -> u64 {
    let mut total = 0u64;
    for c in parts.components() {
        let members = parts.members(c);
        match parts.model() {
            Model::Cliques => {
                let mut pos: Vec<i64> = members.iter().map(|&v| p.pos_of(v) as i64).collect();
                pos.sort_unstable();
                // each sorted position counts + for every smaller one, - for every larger one
                let s = pos.len() as i64;
                let sum: i64 = pos
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| x * (2 * i as i64 - (s - 1)))
                    .sum();
                total += sum as u64;
            }
            Model::Lines => {
                total += members
                    .windows(2)
                    .map(|w| p.pos_of(w[0]).abs_diff(p.pos_of(w[1])) as u64)
                    .sum::<u64>();
            }
        }
    }
    total
}

/// Minimum arrangement cost of a single component of `size` nodes.
pub fn component_optimum(size: usize, model: Model) -> u64 {
    let s = size as u64;
    match model {
        Model::Cliques => (s * s * s - s) / 6,
        Model::Lines => s.saturating_sub(1),
    }
}

pub fn minla_optimum(parts: &ComponentPartition) -> u64 {
    parts
        .components()
        .map(|c| component_optimum(parts.size(c), parts.model()))
        .sum()
}

/// True iff `p` is a minimum linear arrangement of the revealed graph:
/// every clique occupies contiguous positions, every path occupies
/// contiguous positions in path order or its reverse.
pub fn is_minla(p: &Permutation, parts: &ComponentPartition) -> bool {
    parts.components().all(|c| component_is_contiguous(p, parts, c))
}

pub(crate) fn component_is_contiguous(
    p: &Permutation,
    parts: &ComponentPartition,
    c: usize,
) -> bool {
    let members = parts.members(c);
    if members.len() < 2 {
        return true;
    }
    match parts.model() {
        Model::Cliques => {
            let (lo, hi) = members
                .iter()
                .map(|&v| p.pos_of(v))
                .fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
            hi - lo + 1 == members.len()
        }
        Model::Lines => {
            let first = p.pos_of(members[0]);
            let second = p.pos_of(members[1]);
            let step: isize = if second == first + 1 {
                1
            } else if first == second + 1 {
                -1
            } else {
                return false;
            };
            members.iter().enumerate().all(|(i, &v)| {
                p.pos_of(v) as isize == first as isize + step * i as isize
            })
        }
    }
}

use super::lemmas::harmonic_f64;
use super::OptResult;
use crate::algorithms::closest::{closest_minla, closest_with_blocks, BlockShape, DEFAULT_ITEM_CAP};
use crate::error::Result;
use crate::instance::{replay_components, Model, RevealTrace};
use crate::perm::{NodeId, Permutation};

/// Offline optimum that moves once, at the start, to the permutation
/// closest to `pi0` among those feasible after every event.
///
/// For lines these are the permutations laying out each final path
/// contiguously. For cliques every intermediate component must stay
/// contiguous, so each merge orders its two child blocks independently and
/// only the final roots are ordered jointly.
pub fn dp_opt(t: &RevealTrace) -> Result<OptResult> {
    dp_opt_with_cap(t, DEFAULT_ITEM_CAP)
}

pub fn dp_opt_with_cap(t: &RevealTrace, cap: usize) -> Result<OptResult> {
    let closest = match t.model {
        Model::Lines => {
            let parts = replay_components(t, t.k())?;
            closest_minla(&t.pi0, &parts, cap)?
        }
        Model::Cliques => {
            let blocks = merge_tree_blocks(t);
            let shapes = blocks.into_iter().flatten().map(BlockShape::Fixed).collect();
            closest_with_blocks(&t.pi0, shapes, cap)?
        }
    };
    Ok(OptResult {
        cost: closest.distance,
        witness: closest.perm,
    })
}

/// Best laminar-consistent order of each final clique, indexed by node id of
/// the representative (`None` for absorbed slots).
fn merge_tree_blocks(t: &RevealTrace) -> Vec<Option<Vec<NodeId>>> {
    let pi0 = &t.pi0;
    let mut owner: Vec<usize> = (0..t.n).collect();
    let mut blocks: Vec<Option<Vec<NodeId>>> = (0..t.n).map(|v| Some(vec![v])).collect();
    for e in &t.events {
        let (a, b) = (owner[e.u], owner[e.v]);
        let left = blocks[a].take().expect("live block");
        let right = blocks[b].take().expect("live block");
        let a_first = inverted_pairs(pi0, &left, &right);
        let b_first = (left.len() * right.len()) as u64 - a_first;
        let keep_order = a_first < b_first || (a_first == b_first && left[0] < right[0]);
        let merged: Vec<NodeId> = if keep_order {
            left.into_iter().chain(right).collect()
        } else {
            right.into_iter().chain(left).collect()
        };
        for &v in &merged {
            owner[v] = a;
        }
        blocks[a] = Some(merged);
    }
    blocks
}

/// Pairs `(x in first, y in second)` with `y` before `x` in `pi0`.
fn inverted_pairs(pi0: &Permutation, first: &[NodeId], second: &[NodeId]) -> u64 {
    let mut a: Vec<usize> = first.iter().map(|&v| pi0.pos_of(v)).collect();
    let mut b: Vec<usize> = second.iter().map(|&v| pi0.pos_of(v)).collect();
    a.sort_unstable();
    b.sort_unstable();
    let mut j = 0;
    let mut total = 0u64;
    for &x in &a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        total += j as u64;
    }
    total
}

/// 4 for cliques, 8 for lines.
pub fn bound_factor(model: Model) -> f64 {
    match model {
        Model::Cliques => 4.0,
        Model::Lines => 8.0,
    }
}

/// Upper bound on the expected cost of `Rand`: `4 H_n` (cliques) or
/// `8 H_n` (lines) times the distance from `pi0` to the optimum's final
/// permutation.
pub fn bound_for_trace(t: &RevealTrace, opt: &OptResult) -> f64 {
    bound_factor(t.model) * harmonic_f64(t.n as u64) * opt.cost as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::is_minla;
    use crate::instance::RevealEvent;
    use crate::perm::kendall_tau;

    fn trace(model: Model, pi0: &[usize], pairs: &[(usize, usize)]) -> RevealTrace {
        RevealTrace::new(
            model,
            Permutation::from_order(pi0.to_vec()).unwrap(),
            pairs.iter().map(|&(u, v)| RevealEvent::new(u, v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn already_laminar_start() {
        let t = trace(Model::Cliques, &[0, 1, 2, 3], &[(0, 1), (2, 3)]);
        let opt = dp_opt(&t).unwrap();
        assert_eq!(opt.cost, 0);
        assert_eq!(opt.witness, t.pi0);
    }

    #[test]
    fn edge_then_triangle() {
        let t = trace(Model::Cliques, &[0, 1, 2], &[(0, 2), (0, 1)]);
        let opt = dp_opt(&t).unwrap();
        assert_eq!(opt.cost, 1);
        assert_eq!(opt.witness.as_slice(), &[0, 2, 1]);
    }

    #[test]
    fn witness_feasible_at_every_step() {
        let t = trace(Model::Lines, &[0, 2, 1, 3], &[(0, 1), (2, 3)]);
        let opt = dp_opt(&t).unwrap();
        for i in 0..=t.k() {
            assert!(is_minla(&opt.witness, &replay_components(&t, i).unwrap()));
        }
        assert_eq!(kendall_tau(&t.pi0, &opt.witness).unwrap(), opt.cost);
        // blocks {0,1} and {2,3}: best is 0 1 2 3 at distance 1
        assert_eq!(opt.cost, 1);
    }

    #[test]
    fn inverted_pair_count() {
        let pi0 = Permutation::from_order(vec![3, 0, 2, 1]).unwrap();
        // first = {0, 1}, second = {3, 2}: 3 precedes both, 2 precedes 1
        assert_eq!(inverted_pairs(&pi0, &[0, 1], &[3, 2]), 3);
    }

    #[test]
    fn bounds() {
        let t = trace(Model::Cliques, &(0..10).collect::<Vec<_>>(), &[]);
        let opt = OptResult {
            cost: 7,
            witness: t.pi0.clone(),
        };
        let h10 = 7381.0 / 2520.0;
        assert!((bound_for_trace(&t, &opt) - 4.0 * h10 * 7.0).abs() < 1e-9);
        let lines = RevealTrace { model: Model::Lines, ..t.clone() };
        assert!((bound_for_trace(&lines, &opt) - 2.0 * bound_for_trace(&t, &opt)).abs() < 1e-9);
        let zero = OptResult { cost: 0, ..opt };
        assert_eq!(bound_for_trace(&t, &zero), 0.0);
    }
}

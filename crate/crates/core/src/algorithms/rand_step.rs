use num_rational::Ratio;
use rand::Rng;

use super::{AlgoState, Choice, CoinWeights, Mover, Orientation, OrientationWeights, StepReport};
use crate::error::{Error, Result};
use crate::instance::{CompId, RevealEvent, ValidationError};
use crate::perm::{count_inversions, pairs, BlockRange, NodeId};

struct Moved {
    mover: Mover,
    coin: CoinWeights,
    cost: u64,
    /// First position of the now adjacent pair of blocks.
    span_start: usize,
    merged: CompId,
}

fn block_start(state: &AlgoState, c: CompId) -> usize {
    state
        .parts
        .members(c)
        .iter()
        .map(|&v| state.current.pos_of(v))
        .min()
        .expect("components are nonempty")
}

/// Moving phase shared by both models: one block slides over everything
/// strictly between it and the other; `X` moves with probability
/// `|Z| / (|X| + |Z|)`. The partition is merged afterwards.
fn move_phase<R: Rng + ?Sized>(state: &mut AlgoState, event: RevealEvent, rng: &mut R) -> Result<Moved> {
    let index = state.next_event;
    state
        .parts
        .check(event.u, event.v)
        .map_err(|reason| Error::Validation(ValidationError { index: Some(index), reason }))?;
    let x = state.parts.component_of(event.u);
    let z = state.parts.component_of(event.v);
    let (x_len, z_len) = (state.parts.size(x), state.parts.size(z));
    let (x_start, z_start) = (block_start(state, x), block_start(state, z));

    let coin = CoinWeights::for_sizes(x_len, z_len);
    let mover = coin.sample(rng);
    let x_first = x_start < z_start;
    let (block, dest) = match (mover, x_first) {
        (Mover::X, true) => (BlockRange::new(x_start, x_len), z_start - x_len),
        (Mover::X, false) => (BlockRange::new(x_start, x_len), z_start + z_len),
        (Mover::Z, true) => (BlockRange::new(z_start, z_len), x_start + x_len),
        (Mover::Z, false) => (BlockRange::new(z_start, z_len), x_start - z_len),
    };
    let cost = state.current.move_block_in_place(block, dest)?;
    let span_start = match (mover, x_first) {
        (Mover::X, true) => dest,
        (Mover::X, false) => z_start,
        (Mover::Z, true) => x_start,
        (Mover::Z, false) => dest,
    };
    let merged = state
        .parts
        .merge(event.u, event.v)
        .expect("checked above")
        .merged;
    Ok(Moved {
        mover,
        coin,
        cost,
        span_start,
        merged,
    })
}

/// `Rand` for cliques: move one block next to the other; the merged block
/// keeps both internal orders.
pub fn rand_clique_step<R: Rng + ?Sized>(state: &mut AlgoState, event: RevealEvent, rng: &mut R) -> Result<()> {
    let index = state.next_event;
    let moved = move_phase(state, event, rng)?;
    state.record(StepReport {
        event_index: index,
        move_cost: moved.cost,
        rearrange_cost: 0,
        choice: Choice::Move {
            mover: moved.mover,
            coin: moved.coin,
        },
        probability: moved.coin.probability(moved.mover),
    });
    Ok(())
}

/// `Rand` for lines: the moving phase of [`rand_clique_step`], then the
/// joint span is rewritten as the merged path or its reverse. Each target is
/// chosen with probability equal to the other target's cost over
/// `C(|X| + |Z|, 2)`.
pub fn rand_line_step<R: Rng + ?Sized>(state: &mut AlgoState, event: RevealEvent, rng: &mut R) -> Result<()> {
    let index = state.next_event;
    let moved = move_phase(state, event, rng)?;
    let path: Vec<NodeId> = state.parts.members(moved.merged).to_vec();
    let m = path.len();

    for (i, &v) in path.iter().enumerate() {
        state.rank[v] = i;
    }
    let mut ranks: Vec<usize> = (moved.span_start..moved.span_start + m)
        .map(|pos| state.rank[state.current.node_at(pos)])
        .collect();
    let forward_cost = count_inversions(&mut ranks);
    let reversed_cost = pairs(m as u64) - forward_cost;

    let weights = OrientationWeights::from_costs(forward_cost, reversed_cost);
    let orientation = weights.sample(rng);
    let rearrange_cost = match orientation {
        Orientation::Forward => {
            state.current.write_span(moved.span_start, &path);
            forward_cost
        }
        Orientation::Reversed => {
            let rev: Vec<NodeId> = path.iter().rev().copied().collect();
            state.current.write_span(moved.span_start, &rev);
            reversed_cost
        }
    };
    let probability: Ratio<u64> = moved.coin.probability(moved.mover) * weights.probability(orientation);
    state.record(StepReport {
        event_index: index,
        move_cost: moved.cost,
        rearrange_cost,
        choice: Choice::MoveOrient {
            mover: moved.mover,
            coin: moved.coin,
            orientation,
            weights,
        },
        probability,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{trial_rng, AlgoState};
    use crate::instance::{Model, RevealTrace};
    use crate::perm::{kendall_tau, Permutation};

    /// Brings `state` to the components of `prefix` without touching the
    /// permutation (valid when `pi0` already lays them out feasibly).
    fn state_with(model: Model, pi0: &[usize], prefix: &[(usize, usize)], event: (usize, usize)) -> (AlgoState, RevealEvent) {
        let mut events: Vec<RevealEvent> = prefix.iter().map(|&(u, v)| RevealEvent::new(u, v)).collect();
        events.push(RevealEvent::new(event.0, event.1));
        let t = RevealTrace::new(model, Permutation::from_order(pi0.to_vec()).unwrap(), events).unwrap();
        let mut s = AlgoState::new(&t);
        for &(u, v) in prefix {
            s.parts.merge(u, v).unwrap();
            s.next_event += 1;
        }
        (s, RevealEvent::new(event.0, event.1))
    }

    // node labels: x = 0, y1 = 1, y2 = 2, z1 = 3, z2 = 4
    const FIVE_NODES: [usize; 5] = [0, 1, 2, 3, 4];

    #[test]
    fn clique_move_coin_both_outcomes() {
        let mut seen = [false; 2];
        for seed in 0..64 {
            let (mut s, e) = state_with(Model::Cliques, &FIVE_NODES, &[(1, 2), (3, 4)], (0, 3));
            let before = s.current.clone();
            rand_clique_step(&mut s, e, &mut trial_rng(seed)).unwrap();
            let r = &s.step_log[0];
            match r.choice {
                Choice::Move { mover: Mover::X, coin } => {
                    assert_eq!((coin.move_x_num, coin.move_z_num, coin.denom), (2, 1, 3));
                    assert_eq!(r.probability, Ratio::new(2, 3));
                    assert_eq!(s.current.as_slice(), &[1, 2, 0, 3, 4]);
                    assert_eq!(r.move_cost, 2);
                    seen[0] = true;
                }
                Choice::Move { mover: Mover::Z, .. } => {
                    assert_eq!(r.probability, Ratio::new(1, 3));
                    assert_eq!(s.current.as_slice(), &[0, 3, 4, 1, 2]);
                    assert_eq!(r.move_cost, 4);
                    seen[1] = true;
                }
                _ => unreachable!(),
            }
            assert_eq!(r.rearrange_cost, 0);
            assert_eq!(kendall_tau(&before, &s.current).unwrap(), r.move_cost);
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn adjacent_blocks_do_not_move() {
        for seed in 0..16 {
            let (mut s, e) = state_with(Model::Cliques, &[2, 0, 1], &[], (0, 1));
            rand_clique_step(&mut s, e, &mut trial_rng(seed)).unwrap();
            assert_eq!(s.current.as_slice(), &[2, 0, 1]);
            assert_eq!(s.cumulative_cost, 0);
        }
    }

    #[test]
    fn z_left_of_x_moves_correctly() {
        for seed in 0..32 {
            let (mut s, e) = state_with(Model::Cliques, &[3, 1, 0, 2], &[(1, 0)], (2, 3));
            rand_clique_step(&mut s, e, &mut trial_rng(seed)).unwrap();
            let expect: &[usize] = match s.step_log[0].choice {
                Choice::Move { mover: Mover::X, .. } => &[3, 2, 1, 0],
                _ => &[1, 0, 3, 2],
            };
            assert_eq!(s.current.as_slice(), expect);
            assert_eq!(s.cumulative_cost, 2);
        }
    }

    #[test]
    fn line_rearrange_coin_worked_example() {
        // X = path (0,1), Z = path (2,3,4), request (0,2)
        let mut seen = [false; 2];
        for seed in 0..200 {
            let (mut s, e) = state_with(Model::Lines, &[0, 1, 2, 3, 4], &[(0, 1), (2, 3), (3, 4)], (0, 2));
            rand_line_step(&mut s, e, &mut trial_rng(seed)).unwrap();
            let r = &s.step_log[0];
            assert_eq!(r.move_cost, 0);
            let Choice::MoveOrient { weights, orientation, .. } = r.choice else {
                unreachable!()
            };
            assert_eq!(weights.denom, 10);
            match orientation {
                Orientation::Forward => {
                    assert_eq!(weights.probability(orientation), Ratio::new(9, 10));
                    assert_eq!(s.current.as_slice(), &[1, 0, 2, 3, 4]);
                    assert_eq!(r.rearrange_cost, 1);
                    seen[0] = true;
                }
                Orientation::Reversed => {
                    assert_eq!(weights.probability(orientation), Ratio::new(1, 10));
                    assert_eq!(s.current.as_slice(), &[4, 3, 2, 0, 1]);
                    assert_eq!(r.rearrange_cost, 9);
                    seen[1] = true;
                }
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn adjacent_singletons_pick_free_orientation() {
        for seed in 0..32 {
            let (mut s, e) = state_with(Model::Lines, &[0, 1, 2], &[], (2, 1));
            rand_line_step(&mut s, e, &mut trial_rng(seed)).unwrap();
            let r = &s.step_log[0];
            assert_eq!(r.cost(), 0);
            let Choice::MoveOrient { weights, orientation, .. } = r.choice else {
                unreachable!()
            };
            assert_eq!(weights.probability(orientation), Ratio::from_integer(1));
            assert_eq!(s.current.as_slice(), &[0, 1, 2]);
        }
    }

    #[test]
    fn bad_event_is_rejected_without_side_effects() {
        let (mut s, e) = state_with(Model::Lines, &[0, 1, 2], &[(0, 1)], (1, 2));
        rand_line_step(&mut s, e, &mut trial_rng(0)).unwrap();
        let before = s.current.clone();
        assert!(rand_line_step(&mut s, RevealEvent::new(2, 0), &mut trial_rng(0)).is_err());
        assert_eq!(s.current, before);
        assert_eq!(s.next_event(), 2);
    }
}

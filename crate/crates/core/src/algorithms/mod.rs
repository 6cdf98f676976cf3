//! Online algorithms: `Det` jumps to the feasible permutation closest to the
//! start, `Rand` moves one of the two merging blocks by a biased coin and,
//! for lines, picks the merged path's orientation by a second coin.

pub mod closest;
mod det;
mod rand_step;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::feasibility::is_minla;
use crate::instance::{ComponentPartition, Model, RevealEvent, RevealTrace};
use crate::perm::Permutation;

pub use closest::{closest_minla, Closest, DEFAULT_ITEM_CAP};
pub use det::{det_step, det_step_with_cap};
pub use rand_step::{rand_clique_step, rand_line_step};

/// Generator behind every randomized trial.
pub type TrialRng = ChaCha8Rng;

/// Name of [`TrialRng`] recorded in experiment metadata.
pub const RNG_NAME: &str = "rand_chacha::ChaCha8Rng (seed_from_u64)";

pub fn trial_rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Det,
    Rand,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Det => "det",
            Algorithm::Rand => "rand",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "det" => Ok(Algorithm::Det),
            "rand" => Ok(Algorithm::Rand),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Which block moved in the moving phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mover {
    /// The component of the event's first node.
    X,
    /// The component of the event's second node.
    Z,
}

/// Orientation picked for a merged path: the path order as stored in the
/// partition, or its reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Reversed,
}

/// Moving-phase coin. `X` moves with probability `move_x_num / denom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoinWeights {
    pub move_x_num: u64,
    pub move_z_num: u64,
    pub denom: u64,
}

impl CoinWeights {
    pub fn for_sizes(x_size: usize, z_size: usize) -> Self {
        CoinWeights {
            move_x_num: z_size as u64,
            move_z_num: x_size as u64,
            denom: (x_size + z_size) as u64,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Mover {
        if rng.random_range(0..self.denom) < self.move_x_num {
            Mover::X
        } else {
            Mover::Z
        }
    }

    pub fn probability(&self, mover: Mover) -> Ratio<u64> {
        match mover {
            Mover::X => Ratio::new(self.move_x_num, self.denom),
            Mover::Z => Ratio::new(self.move_z_num, self.denom),
        }
    }
}

/// Rearranging-phase coin. Each orientation is drawn with probability
/// equal to the cost of the other one over `C(|X| + |Z|, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientationWeights {
    pub forward_num: u64,
    pub reversed_num: u64,
    pub denom: u64,
}

impl OrientationWeights {
    pub fn from_costs(forward_cost: u64, reversed_cost: u64) -> Self {
        OrientationWeights {
            forward_num: reversed_cost,
            reversed_num: forward_cost,
            denom: forward_cost + reversed_cost,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Orientation {
        if rng.random_range(0..self.denom) < self.forward_num {
            Orientation::Forward
        } else {
            Orientation::Reversed
        }
    }

    pub fn probability(&self, o: Orientation) -> Ratio<u64> {
        match o {
            Orientation::Forward => Ratio::new(self.forward_num, self.denom),
            Orientation::Reversed => Ratio::new(self.reversed_num, self.denom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    /// `Det` jumped to the closest feasible permutation.
    Closest,
    Move {
        mover: Mover,
        coin: CoinWeights,
    },
    MoveOrient {
        mover: Mover,
        coin: CoinWeights,
        orientation: Orientation,
        weights: OrientationWeights,
    },
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mover = |m: &Mover| match m {
            Mover::X => "move-x",
            Mover::Z => "move-z",
        };
        match self {
            Choice::Closest => f.write_str("closest"),
            Choice::Move { mover: m, .. } => f.write_str(mover(m)),
            Choice::MoveOrient {
                mover: m,
                orientation,
                ..
            } => {
                let o = match orientation {
                    Orientation::Forward => "forward",
                    Orientation::Reversed => "reversed",
                };
                write!(f, "{}+{}", mover(m), o)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub event_index: usize,
    pub move_cost: u64,
    /// Orientation fix-up cost; zero for cliques and for `Det`.
    pub rearrange_cost: u64,
    pub choice: Choice,
    /// Probability of the realized action.
    pub probability: Ratio<u64>,
}

#[derive(Serialize)]
struct StepLine<'a> {
    event_index: usize,
    move_cost: u64,
    rearrange_cost: u64,
    choice: &'a str,
    prob_num: u64,
    prob_den: u64,
}

impl StepReport {
    pub fn cost(&self) -> u64 {
        self.move_cost + self.rearrange_cost
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        let choice = self.choice.to_string();
        serde_json::to_string(&StepLine {
            event_index: self.event_index,
            move_cost: self.move_cost,
            rearrange_cost: self.rearrange_cost,
            choice: &choice,
            prob_num: *self.probability.numer(),
            prob_den: *self.probability.denom(),
        })
        .expect("plain struct serializes")
    }
}

/// State of one online run.
#[derive(Clone, Debug)]
pub struct AlgoState {
    pub current: Permutation,
    pub parts: ComponentPartition,
    pub cumulative_cost: u64,
    pub step_log: Vec<StepReport>,
    next_event: usize,
    rank: Vec<usize>,
}

impl AlgoState {
    pub fn new(trace: &RevealTrace) -> Self {
        AlgoState {
            current: trace.pi0.clone(),
            parts: ComponentPartition::singletons(trace.n, trace.model),
            cumulative_cost: 0,
            step_log: Vec::new(),
            next_event: 0,
            rank: vec![0; trace.n],
        }
    }

    /// Index of the next event to serve.
    pub fn next_event(&self) -> usize {
        self.next_event
    }

    pub fn move_cost(&self) -> u64 {
        self.step_log.iter().map(|s| s.move_cost).sum()
    }

    pub fn rearrange_cost(&self) -> u64 {
        self.step_log.iter().map(|s| s.rearrange_cost).sum()
    }

    fn record(&mut self, report: StepReport) {
        self.cumulative_cost += report.cost();
        self.step_log.push(report);
        self.next_event += 1;
    }
}

/// Serves one event with the given algorithm. Randomness is drawn only by
/// `Rand`.
pub fn serve<R: Rng + ?Sized>(
    algo: Algorithm,
    state: &mut AlgoState,
    event: RevealEvent,
    trace: &RevealTrace,
    rng: &mut R,
) -> Result<()> {
    match (algo, trace.model) {
        (Algorithm::Det, _) => det_step(state, event, trace),
        (Algorithm::Rand, Model::Cliques) => rand_clique_step(state, event, rng),
        (Algorithm::Rand, Model::Lines) => rand_line_step(state, event, rng),
    }
}

/// Replays every event of `trace`. The permutation is checked to be a
/// minimum linear arrangement after every step.
pub fn run_with_rng<R: Rng + ?Sized>(algo: Algorithm, trace: &RevealTrace, rng: &mut R) -> Result<AlgoState> {
    let mut state = AlgoState::new(trace);
    for &event in &trace.events {
        serve(algo, &mut state, event, trace, rng)?;
        assert!(
            is_minla(&state.current, &state.parts),
            "{algo} left an infeasible permutation after event {}",
            state.next_event - 1
        );
    }
    Ok(state)
}

pub fn run(algo: Algorithm, trace: &RevealTrace, seed: u64) -> Result<AlgoState> {
    run_with_rng(algo, trace, &mut trial_rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_weights_invariants() {
        let c = CoinWeights::for_sizes(1, 2);
        assert_eq!((c.move_x_num, c.move_z_num, c.denom), (2, 1, 3));
        assert_eq!(c.probability(Mover::X) + c.probability(Mover::Z), Ratio::from_integer(1));
    }

    #[test]
    fn coin_sampling_respects_zero_weight() {
        let w = OrientationWeights::from_costs(0, 1);
        let mut rng = trial_rng(3);
        for _ in 0..100 {
            assert_eq!(w.sample(&mut rng), Orientation::Forward);
        }
    }

    #[test]
    fn step_json_line() {
        let r = StepReport {
            event_index: 2,
            move_cost: 3,
            rearrange_cost: 1,
            choice: Choice::Move {
                mover: Mover::Z,
                coin: CoinWeights::for_sizes(1, 2),
            },
            probability: Ratio::new(1, 3),
        };
        assert_eq!(
            r.to_json_line(),
            r#"{"event_index":2,"move_cost":3,"rearrange_cost":1,"choice":"move-z","prob_num":1,"prob_den":3}"#
        );
    }

    #[test]
    fn empty_trace_costs_nothing() {
        let t = RevealTrace::new(Model::Cliques, Permutation::identity(4), vec![]).unwrap();
        for algo in [Algorithm::Det, Algorithm::Rand] {
            let s = run(algo, &t, 1).unwrap();
            assert_eq!(s.cumulative_cost, 0);
            assert_eq!(s.current, t.pi0);
        }
    }
}

//! Instance generators: the random balanced-tree line distribution, the
//! adaptive middle-node adversary against closest-to-start algorithms, and
//! uniformly random traces for property sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algorithms::{trial_rng, TrialRng};
use crate::error::{Error, Result};
use crate::instance::{ComponentPartition, Model, RevealEvent, RevealTrace};
use crate::perm::{NodeId, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeAdversaryConfig {
    /// Tree depth; `n = 2^q`.
    pub q: u32,
    pub seed: u64,
}

/// Draws a uniform leaf order `P` and reveals the balanced binary tree over
/// it bottom-up: for each internal node, the rightmost leaf under its left
/// child joins the leftmost leaf under its right child. The final graph is
/// the single path `P`.
pub fn tree_adversary(cfg: TreeAdversaryConfig, pi0: &Permutation) -> Result<RevealTrace> {
    if cfg.q == 0 || cfg.q >= usize::BITS {
        return Err(Error::Config(format!("tree depth must be at least 1, got {}", cfg.q)));
    }
    let n = 1usize << cfg.q;
    if pi0.len() != n {
        return Err(Error::InstanceMismatch {
            expected: n,
            actual: pi0.len(),
        });
    }
    let mut leaves: Vec<NodeId> = (0..n).collect();
    leaves.shuffle(&mut trial_rng(cfg.seed));
    tree_trace(&leaves, pi0)
}

/// The tree reveal sequence for an explicit leaf order.
pub fn tree_trace(leaves: &[NodeId], pi0: &Permutation) -> Result<RevealTrace> {
    let n = leaves.len();
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut events = Vec::with_capacity(n - 1);
    let mut span = 2;
    while span <= n {
        for start in (0..n).step_by(span) {
            let mid = start + span / 2;
            events.push(RevealEvent::new(leaves[mid - 1], leaves[mid]));
        }
        span *= 2;
    }
    RevealTrace::new(Model::Lines, pi0.clone(), events)
}

/// Side of the lone middle node relative to the grown component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An adversary that picks each reveal after seeing the algorithm's current
/// permutation.
pub trait AdaptiveAdversary {
    fn next_event(&mut self, current: &Permutation) -> Result<Option<RevealEvent>>;
}

/// Grows one path around the middle node `x` of the start order, always
/// taking the neighbor on the side of `x` opposite the grown path, until
/// only `x` is left out.
#[derive(Clone, Debug)]
pub struct MiddleLineAdversary {
    pi0: Permutation,
    mid: usize,
    left_taken: usize,
    right_taken: usize,
    emitted: usize,
    sides: Vec<Side>,
}

impl MiddleLineAdversary {
    /// Start order is the identity `0 1 ... n-1`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_start(Permutation::identity(n))
    }

    pub fn with_start(pi0: Permutation) -> Result<Self> {
        let n = pi0.len();
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::Config(format!("middle-line adversary needs odd n >= 5, got {n}")));
        }
        Ok(MiddleLineAdversary {
            pi0,
            mid: n / 2,
            left_taken: 0,
            right_taken: 0,
            emitted: 0,
            sides: Vec::new(),
        })
    }

    pub fn pi0(&self) -> &Permutation {
        &self.pi0
    }

    /// The node left alone.
    pub fn x(&self) -> NodeId {
        self.pi0.node_at(self.mid)
    }

    /// Side of `x` relative to the grown path observed before each event
    /// after the first.
    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// Number of times `x` switched sides between consecutive observations.
    pub fn alternations(&self) -> usize {
        self.sides.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn grown(&self) -> impl Iterator<Item = NodeId> + '_ {
        (self.mid - self.left_taken..self.mid)
            .chain(self.mid + 1..=self.mid + self.right_taken)
            .map(|p| self.pi0.node_at(p))
    }
}

impl AdaptiveAdversary for MiddleLineAdversary {
    fn next_event(&mut self, current: &Permutation) -> Result<Option<RevealEvent>> {
        let n = self.pi0.len();
        if current.len() != n {
            return Err(Error::InstanceMismatch {
                expected: n,
                actual: current.len(),
            });
        }
        if self.emitted == n - 2 {
            return Ok(None);
        }
        if self.emitted == 0 {
            self.emitted = 1;
            self.left_taken = 1;
            self.right_taken = 1;
            let y1 = self.pi0.node_at(self.mid - 1);
            let y2 = self.pi0.node_at(self.mid + 1);
            return Ok(Some(RevealEvent::new(y1, y2)));
        }

        let size = self.left_taken + self.right_taken;
        let (lo, hi) = self
            .grown()
            .map(|v| current.pos_of(v))
            .fold((usize::MAX, 0), |(lo, hi), p| (lo.min(p), hi.max(p)));
        if hi - lo + 1 != size {
            return Err(Error::Protocol(format!(
                "grown path of {size} nodes is not contiguous in the opposing permutation"
            )));
        }
        let x_pos = current.pos_of(self.x());
        let side = if x_pos < lo { Side::Left } else { Side::Right };
        self.sides.push(side);

        let left_free = self.mid - self.left_taken > 0;
        let right_free = self.mid + self.right_taken + 1 < n;
        let take_left = match side {
            Side::Left => left_free,
            Side::Right => !right_free,
        };
        let event = if take_left {
            let end = self.pi0.node_at(self.mid - self.left_taken);
            self.left_taken += 1;
            RevealEvent::new(self.pi0.node_at(self.mid - self.left_taken), end)
        } else {
            let end = self.pi0.node_at(self.mid + self.right_taken);
            self.right_taken += 1;
            RevealEvent::new(self.pi0.node_at(self.mid + self.right_taken), end)
        };
        self.emitted += 1;
        Ok(Some(event))
    }
}

/// Uniform random start order and `n - 1` uniformly random merges.
pub fn random_trace(model: Model, n: usize, seed: u64) -> RevealTrace {
    random_trace_with_events(model, n, n.saturating_sub(1), seed)
}

/// Uniform random start order and `k` merges of uniformly random distinct
/// components; for lines each side attaches at a uniformly random endpoint.
pub fn random_trace_with_events(model: Model, n: usize, k: usize, seed: u64) -> RevealTrace {
    let k = k.min(n.saturating_sub(1));
    let mut rng = trial_rng(seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let pi0 = Permutation::from_order(order).expect("shuffled identity");

    let mut parts = ComponentPartition::singletons(n, model);
    let mut events = Vec::with_capacity(k);
    for _ in 0..k {
        let live: Vec<usize> = parts.components().collect();
        let a = rng.random_range(0..live.len());
        let mut b = rng.random_range(0..live.len() - 1);
        if b >= a {
            b += 1;
        }
        let pick = |rng: &mut TrialRng, c: usize| -> NodeId {
            let m = parts.members(c);
            match model {
                Model::Cliques => m[rng.random_range(0..m.len())],
                Model::Lines => {
                    if rng.random_bool(0.5) {
                        m[0]
                    } else {
                        m[m.len() - 1]
                    }
                }
            }
        };
        let u = pick(&mut rng, live[a]);
        let v = pick(&mut rng, live[b]);
        parts.merge(u, v).expect("distinct components, endpoints");
        events.push(RevealEvent::new(u, v));
    }
    RevealTrace::new(model, pi0, events).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{replay_components, validate_trace};

    #[test]
    fn tree_example_q2() {
        let t = tree_trace(&[10, 11, 12, 13].map(|v| v - 10), &Permutation::identity(4)).unwrap();
        let pairs: Vec<_> = t.events.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3), (1, 2)]);

        let t = tree_trace(&[3, 0, 2, 1], &Permutation::identity(4)).unwrap();
        let pairs: Vec<_> = t.events.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(3, 0), (2, 1), (0, 2)]);
    }

    #[test]
    fn tree_q1_single_event() {
        let cfg = TreeAdversaryConfig { q: 1, seed: 4 };
        let t = tree_adversary(cfg, &Permutation::identity(2)).unwrap();
        assert_eq!(t.k(), 1);
    }

    #[test]
    fn tree_final_path_is_leaf_order() {
        for q in 1..=6 {
            let n = 1 << q;
            let t = tree_adversary(TreeAdversaryConfig { q, seed: q as u64 }, &Permutation::identity(n)).unwrap();
            assert!(validate_trace(&t).is_ok());
            let parts = replay_components(&t, t.k()).unwrap();
            assert_eq!(parts.count(), 1);
            let path = parts.members(parts.components().next().unwrap()).to_vec();
            // same leaf order drawn again from the seed
            let mut leaves: Vec<usize> = (0..n).collect();
            leaves.shuffle(&mut trial_rng(q as u64));
            assert_eq!(path, leaves);
        }
    }

    #[test]
    fn tree_errors() {
        let cfg = TreeAdversaryConfig { q: 2, seed: 0 };
        assert!(matches!(tree_adversary(cfg, &Permutation::identity(5)), Err(Error::InstanceMismatch { .. })));
        assert!(tree_adversary(TreeAdversaryConfig { q: 0, seed: 0 }, &Permutation::identity(1)).is_err());
        assert!(matches!(tree_trace(&[0, 1, 2], &Permutation::identity(3)), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn middle_line_first_event() {
        let mut adv = MiddleLineAdversary::new(5).unwrap();
        assert_eq!(adv.x(), 2);
        let e = adv.next_event(&Permutation::identity(5)).unwrap().unwrap();
        assert_eq!((e.u, e.v), (1, 3));
        assert!(MiddleLineAdversary::new(6).is_err());
        assert!(MiddleLineAdversary::new(3).is_err());
    }

    #[test]
    fn middle_line_follows_x() {
        let mut adv = MiddleLineAdversary::new(5).unwrap();
        adv.next_event(&Permutation::identity(5)).unwrap();
        // x = 2 to the right of path {1, 3}: take node 4 on the right
        let cur = Permutation::from_order(vec![0, 1, 3, 2, 4]).unwrap();
        let e = adv.next_event(&cur).unwrap().unwrap();
        assert_eq!((e.u, e.v), (4, 3));
        assert_eq!(adv.sides(), &[Side::Right]);
        // x left of {1, 3, 4}: take node 0
        let cur = Permutation::from_order(vec![0, 2, 1, 3, 4]).unwrap();
        let e = adv.next_event(&cur).unwrap().unwrap();
        assert_eq!((e.u, e.v), (0, 1));
        assert_eq!(adv.alternations(), 1);
        assert_eq!(adv.next_event(&cur).unwrap(), None);
    }

    #[test]
    fn middle_line_rejects_broken_path() {
        let mut adv = MiddleLineAdversary::new(5).unwrap();
        adv.next_event(&Permutation::identity(5)).unwrap();
        assert!(matches!(adv.next_event(&Permutation::identity(5)), Err(Error::Protocol(_))));
    }

    #[test]
    fn random_traces_are_valid() {
        assert_eq!(random_trace(Model::Lines, 1, 0).k(), 0);
        let a = random_trace(Model::Cliques, 7, 9);
        assert_eq!(a, random_trace(Model::Cliques, 7, 9));
        assert_eq!(a.k(), 6);
        for seed in 0..500 {
            for model in [Model::Cliques, Model::Lines] {
                let n = 1 + (seed as usize % 10);
                let t = random_trace_with_events(model, n, seed as usize % n, seed);
                assert!(validate_trace(&t).is_ok());
            }
        }
    }
}

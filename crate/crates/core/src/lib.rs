//! Online learning minimum linear arrangement for collections of cliques and
//! collections of lines.
//!
//! A graph is revealed piece by piece over a fixed node set. After every
//! reveal the maintained permutation must be a minimum linear arrangement of
//! the graph seen so far, and the cost is the number of adjacent swaps spent
//! on updates. The crate provides the deterministic closest-to-start
//! algorithm, the randomized coin-flipping algorithm, exact offline optima,
//! lower-bound instance generators and a Monte Carlo harness.

pub mod adversaries;
pub mod algorithms;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod instance;
pub mod oracle;
pub mod perm;

pub use error::{Error, Result};
pub use instance::{ComponentPartition, Model, RevealEvent, RevealTrace};
pub use perm::{BlockRange, NodeId, Permutation};

use thiserror::Error;

use crate::instance::ValidationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance mismatch: expected {expected} nodes, got {actual}")]
    InstanceMismatch { expected: usize, actual: usize },

    #[error("not a permutation of 0..{n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("block [{start}, {start}+{len}) out of range for n = {n}")]
    BlockOutOfRange { start: usize, len: usize, n: usize },

    #[error("destination {dest} out of range for a block of length {len} in n = {n}")]
    DestinationOutOfRange { dest: usize, len: usize, n: usize },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error("step index {index} out of range (trace has {events} events)")]
    StepOutOfRange { index: usize, events: usize },

    #[error("{what}: {items} items exceed the cap of {cap}")]
    Capacity {
        what: &'static str,
        items: usize,
        cap: usize,
    },

    #[error("node sets overlap")]
    Overlap,

    #[error("empty node set")]
    EmptySet,

    #[error("orientation needs a component of at least two nodes")]
    SingletonComponent,

    #[error("n must be a power of two, got {0}")]
    NotPowerOfTwo(usize),

    #[error("adversary protocol error: {0}")]
    Protocol(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::Verification(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

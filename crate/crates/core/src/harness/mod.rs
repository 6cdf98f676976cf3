//! Experiment plumbing shared by the CLI and the acceptance suite: seeded
//! Monte Carlo runs, lemma frequency checks, adaptive duels and the full
//! benchmark suite.

pub mod bench;
pub mod duel;
pub mod experiment;
pub mod stats;
pub mod verify;

pub use duel::{duel_middle_line, DuelReport};
pub use experiment::{run_experiment, trace_id, Experiment, ExperimentConfig, OutputFormat, TraceSource, TrialRecord};
pub use stats::{StatsAccumulator, TrialStats};
pub use verify::{verify_lemma, LemmaKind, VerifyConfig, VerifyReport};

use num_rational::Ratio;

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = concat!("minla ", env!("CARGO_PKG_VERSION"));

/// Smallest trial count accepted by the frequency checks.
pub const MIN_VERIFY_TRIALS: u64 = 1_000;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 output finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`: element `index` of the splitmix64
/// stream started at `master`. Trials never share a stream and appending
/// trials leaves the earlier seeds unchanged.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Exact decimal rendering of a nonnegative ratio with `digits` places,
/// rounding half up.
pub fn format_ratio(r: Ratio<u64>, digits: u32) -> String {
    let scale = 10u128.pow(digits);
    let num = *r.numer() as u128;
    let den = *r.denom() as u128;
    let scaled = (2 * num * scale + den) / (2 * den);
    let int = scaled / scale;
    let frac = scaled % scale;
    if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac:0width$}", width = digits as usize)
    }
}

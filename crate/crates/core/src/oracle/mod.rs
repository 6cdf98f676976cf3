//! Ground truth for the online algorithms: offline optima, closed-form
//! probabilities of the randomized algorithm, and the algebraic inequalities
//! behind its cost bounds.

mod exhaustive;
mod lemmas;
mod opt;

pub use exhaustive::{all_orders, exhaustive_opt, EXHAUSTIVE_MAX_N};
pub use lemmas::{
    check_harmonic_bounds, check_identity_lemmas, harmonic_f64, harmonic_number, left_right_probability,
    orientation_probability, Harmonic, HarmonicBounds, IdentityCheck, EXACT_HARMONIC_LIMIT, IDENTITY_MAX_N,
};
pub use opt::{bound_factor, bound_for_trace, dp_opt, dp_opt_with_cap};

use serde::{Serialize, Serializer};

use crate::perm::Permutation;

/// Offline optimum: its cost and one final permutation realizing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptResult {
    pub cost: u64,
    #[serde(serialize_with = "as_display")]
    pub witness: Permutation,
}

fn as_display<S: Serializer>(p: &Permutation, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

use num_rational::Ratio;

use super::closest::{closest_minla, DEFAULT_ITEM_CAP};
use super::{AlgoState, Choice, StepReport};
use crate::error::{Result, Error};
use crate::instance::{RevealEvent, RevealTrace, ValidationError};
use crate::perm::kendall_tau;

/// `Det`: move to the minimum linear arrangement of the new graph closest to
/// `pi0`, ties broken by the lexicographically smallest node sequence.
pub fn det_step(state: &mut AlgoState, event: RevealEvent, trace: &RevealTrace) -> Result<()> {
    det_step_with_cap(state, event, trace, DEFAULT_ITEM_CAP)
}

pub fn det_step_with_cap(
    state: &mut AlgoState,
    event: RevealEvent,
    trace: &RevealTrace,
    cap: usize,
) -> Result<()> {
    let index = state.next_event;
    // search before mutating so a capacity error leaves the state intact
    let mut parts = state.parts.clone();
    parts
        .merge(event.u, event.v)
        .map_err(|reason| Error::Validation(ValidationError { index: Some(index), reason }))?;
    let target = closest_minla(&trace.pi0, &parts, cap)?;
    let cost = kendall_tau(&state.current, &target.perm)?;
    state.parts = parts;
    state.current = target.perm;
    state.record(StepReport {
        event_index: index,
        move_cost: cost,
        rearrange_cost: 0,
        choice: Choice::Closest,
        probability: Ratio::from_integer(1),
    });
    Ok(())
}

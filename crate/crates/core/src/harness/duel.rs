use num_rational::Ratio;
use serde::Serialize;

use crate::adversaries::{AdaptiveAdversary, MiddleLineAdversary, Side};
use crate::algorithms::{det_step, run, AlgoState, Algorithm};
use crate::error::{Error, Result};
use crate::instance::{Model, RevealTrace};
use crate::oracle::{dp_opt, OptResult};

/// Result of `Det` against the middle-line adversary.
#[derive(Clone, Debug)]
pub struct DuelReport {
    pub n: usize,
    pub det_cost: u64,
    pub opt: OptResult,
    /// `det_cost / opt.cost`; `None` if the optimum is zero.
    pub ratio: Option<Ratio<u64>>,
    pub sides: Vec<Side>,
    pub alternations: usize,
    /// The reveal sequence the adversary produced, replayable on its own.
    pub trace: RevealTrace,
    /// Cost of `Det` on `trace` run non-adaptively.
    pub replay_cost: u64,
}

#[derive(Serialize)]
struct DuelJson<'a> {
    n: usize,
    det_cost: u64,
    opt: &'a OptResult,
    ratio: Option<f64>,
    alternations: usize,
    sides: Vec<&'static str>,
    replay_cost: u64,
}

impl DuelReport {
    pub fn ratio_f64(&self) -> Option<f64> {
        self.ratio.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    pub fn to_json(&self) -> String {
        let sides = self
            .sides
            .iter()
            .map(|s| match s {
                Side::Left => "left",
                Side::Right => "right",
            })
            .collect();
        serde_json::to_string_pretty(&DuelJson {
            n: self.n,
            det_cost: self.det_cost,
            opt: &self.opt,
            ratio: self.ratio_f64(),
            alternations: self.alternations,
            sides,
            replay_cost: self.replay_cost,
        })
        .expect("plain struct serializes")
            + "\n"
    }
}

/// Plays `Det` against [`MiddleLineAdversary`] on `n` nodes, then replays
/// the induced trace to confirm the adaptive run is reproducible.
pub fn duel_middle_line(n: usize) -> Result<DuelReport> {
    let mut adversary = MiddleLineAdversary::new(n)?;
    let mut trace = RevealTrace::new(Model::Lines, adversary.pi0().clone(), Vec::new())?;
    let mut state = AlgoState::new(&trace);
    while let Some(event) = adversary.next_event(&state.current)? {
        trace.events.push(event);
        det_step(&mut state, event, &trace)?;
    }
    // revalidate the whole induced sequence as a standalone trace
    let trace = RevealTrace::new(trace.model, trace.pi0, trace.events)?;
    let opt = dp_opt(&trace)?;
    let replay_cost = run(Algorithm::Det, &trace, 0)?.cumulative_cost;
    if replay_cost != state.cumulative_cost {
        return Err(Error::Verification(format!(
            "replayed duel cost {replay_cost} differs from adaptive cost {}",
            state.cumulative_cost
        )));
    }
    Ok(DuelReport {
        n,
        det_cost: state.cumulative_cost,
        ratio: (opt.cost > 0).then(|| Ratio::new(state.cumulative_cost, opt.cost)),
        opt,
        sides: adversary.sides().to_vec(),
        alternations: adversary.alternations(),
        trace,
        replay_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::replay_components;

    #[test]
    fn five_nodes() {
        let d = duel_middle_line(5).unwrap();
        assert_eq!(d.trace.events[0], crate::instance::RevealEvent::new(1, 3));
        assert_eq!(d.trace.k(), 3);
        assert!(d.ratio.unwrap() >= Ratio::from_integer(1));
        assert!(d.alternations >= 1);
        assert_eq!(d.replay_cost, d.det_cost);
        // one path of n - 1 nodes plus the middle node alone
        let parts = replay_components(&d.trace, d.trace.k()).unwrap();
        assert_eq!(parts.count(), 2);
        assert_eq!(parts.size(parts.component_of(2)), 1);
    }

    #[test]
    fn alternates_often() {
        for n in [7, 9, 11] {
            let d = duel_middle_line(n).unwrap();
            assert!(d.alternations >= (n - 3) / 2, "n = {n}: {} alternations", d.alternations);
        }
    }

    #[test]
    fn rejects_even_n() {
        assert!(matches!(duel_middle_line(6), Err(Error::Config(_))));
    }
}

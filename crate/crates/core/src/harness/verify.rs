use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{trial_seed, MIN_VERIFY_TRIALS};
use crate::adversaries::random_trace_with_events;
use crate::algorithms::{serve, trial_rng, AlgoState, Algorithm};
use crate::error::{Error, Result};
use crate::instance::{ComponentPartition, Model, RevealEvent, RevealTrace};
use crate::oracle::{check_harmonic_bounds, check_identity_lemmas, left_right_probability, orientation_probability};
use crate::perm::{NodeId, Permutation};

/// Allowed deviation, in binomial standard errors.
pub const SIGMA_LIMIT: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaKind {
    /// Probability that one clique lies left of another.
    LeftRight,
    /// Probability of each orientation of a path.
    Orientation,
    /// Harmonic-sum inequalities on random positive series.
    Harmonic,
    /// Expectation identity and cross-product inequality over `{0,1}^N`.
    Identities,
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaKind::LeftRight => "left-right",
            LemmaKind::Orientation => "orientation",
            LemmaKind::Harmonic => "harmonic",
            LemmaKind::Identities => "identities",
        })
    }
}

impl FromStr for LemmaKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "left-right" => Ok(LemmaKind::LeftRight),
            "orientation" => Ok(LemmaKind::Orientation),
            "harmonic" => Ok(LemmaKind::Harmonic),
            "identities" => Ok(LemmaKind::Identities),
            other => Err(format!(
                "unknown lemma '{other}', expected left-right, orientation, harmonic or identities"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub kind: LemmaKind,
    pub trials: u64,
    pub seed: u64,
    /// Traces for the frequency checks; empty selects [`default_traces`].
    pub traces: Vec<RevealTrace>,
}

/// Empirical frequency of one event against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyCheck {
    pub trace: usize,
    /// The event after which the configuration is observed.
    pub event: usize,
    pub label: String,
    pub expected_num: u64,
    pub expected_den: u64,
    pub hits: u64,
    pub trials: u64,
    /// Deviation in standard errors; zero when the expectation is 0 or 1.
    pub z: f64,
    pub pass: bool,
}

/// Outcome of a sweep over random instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub instances: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub kind: LemmaKind,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<FrequencyCheck>,
    pub sweep: Option<SweepSummary>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn worst_z(&self) -> f64 {
        self.checks.iter().map(|c| c.z).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count() + self.sweep.as_ref().map_or(0, |s| s.failures as usize)
    }
}

/// Compares an observed count with a binomial expectation: exact agreement
/// when `p` is 0 or 1, otherwise within [`SIGMA_LIMIT`] standard errors.
pub fn binomial_check(expected: Ratio<u64>, hits: u64, trials: u64) -> (f64, bool) {
    let p = *expected.numer() as f64 / *expected.denom() as f64;
    if *expected.numer() == 0 {
        return (0.0, hits == 0);
    }
    if expected.numer() == expected.denom() {
        return (0.0, hits == trials);
    }
    let freq = hits as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    let z = (freq - p).abs() / se;
    (z, z <= SIGMA_LIMIT)
}

/// The traces used when none are supplied: a hand-sized one followed by five
/// pinned random traces with `n <= 12` that stop short of a single component.
pub fn default_traces(model: Model) -> Vec<RevealTrace> {
    let small = match model {
        Model::Cliques => RevealTrace::new(
            model,
            Permutation::from_order(vec![0, 1, 2]).expect("valid"),
            vec![RevealEvent::new(0, 2), RevealEvent::new(0, 1)],
        ),
        Model::Lines => RevealTrace::new(
            model,
            Permutation::from_order(vec![1, 0]).expect("valid"),
            vec![RevealEvent::new(0, 1)],
        ),
    }
    .expect("valid trace");
    let mut out = vec![small];
    for (i, &(n, k)) in [(6, 4), (8, 6), (9, 6), (11, 9), (12, 9)].iter().enumerate() {
        out.push(random_trace_with_events(model, n, k, 0x5eed_0000 + i as u64));
    }
    out
}

pub fn verify_lemma(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.trials < MIN_VERIFY_TRIALS {
        return Err(Error::Config(format!(
            "verification needs at least {MIN_VERIFY_TRIALS} trials, got {}",
            cfg.trials
        )));
    }
    let (checks, sweep) = match cfg.kind {
        LemmaKind::LeftRight | LemmaKind::Orientation => {
            let model = if cfg.kind == LemmaKind::LeftRight {
                Model::Cliques
            } else {
                Model::Lines
            };
            let traces = if cfg.traces.is_empty() {
                default_traces(model)
            } else {
                cfg.traces.clone()
            };
            let mut checks = Vec::new();
            for (i, t) in traces.iter().enumerate() {
                if t.model != model {
                    return Err(Error::Config(format!(
                        "{} verification needs a {} trace, trace {i} is {}",
                        cfg.kind, model, t.model
                    )));
                }
                checks.extend(frequency_checks(cfg.kind, i, t, cfg.trials, cfg.seed)?);
            }
            (checks, None)
        }
        LemmaKind::Harmonic => (Vec::new(), Some(harmonic_sweep(cfg.trials, cfg.seed)?)),
        LemmaKind::Identities => (Vec::new(), Some(identity_sweep(cfg.trials, cfg.seed)?)),
    };
    let passed = checks.iter().all(|c| c.pass) && sweep.as_ref().is_none_or(|s| s.failures == 0);
    Ok(VerifyReport {
        kind: cfg.kind,
        trials: cfg.trials,
        seed: cfg.seed,
        checks,
        sweep,
        passed,
    })
}

/// One tracked quantity: after event `event`, is `first` laid out before
/// `second`?
struct Probe {
    event: usize,
    label: String,
    first: NodeId,
    second: NodeId,
    expected: Ratio<u64>,
}

/// Probes for every event of `t`. For cliques: the merged component against
/// each other component (left-of). For lines: the merged path in its stored
/// orientation (first node before last node).
fn probes(kind: LemmaKind, t: &RevealTrace) -> Result<Vec<Probe>> {
    let mut parts = ComponentPartition::singletons(t.n, t.model);
    let mut out = Vec::new();
    for (i, e) in t.events.iter().enumerate() {
        let merged = parts
            .merge(e.u, e.v)
            .map_err(|reason| Error::Validation(crate::instance::ValidationError { index: Some(i), reason }))?
            .merged;
        match kind {
            LemmaKind::LeftRight => {
                let x = parts.members(merged).to_vec();
                for c in parts.components() {
                    if c == merged {
                        continue;
                    }
                    let y = parts.members(c);
                    out.push(Probe {
                        event: i,
                        label: format!("{} --- {}", set_label(&x), set_label(y)),
                        first: x[0],
                        second: y[0],
                        expected: left_right_probability(&x, y, &t.pi0)?,
                    });
                }
            }
            _ => {
                let path = parts.path_order(merged).expect("lines model").to_vec();
                out.push(Probe {
                    event: i,
                    label: format!("-> {}", path_label(&path)),
                    first: path[0],
                    second: *path.last().expect("nonempty"),
                    expected: orientation_probability(&path, &t.pi0)?,
                });
            }
        }
    }
    Ok(out)
}

fn set_label(s: &[NodeId]) -> String {
    let mut v = s.to_vec();
    v.sort_unstable();
    format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn path_label(p: &[NodeId]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn frequency_checks(kind: LemmaKind, index: usize, t: &RevealTrace, trials: u64, seed: u64) -> Result<Vec<FrequencyCheck>> {
    let probes = probes(kind, t)?;
    // each trace gets its own seed stream
    let master = trial_seed(seed, index as u64);
    let hits = (0..trials)
        .into_par_iter()
        .try_fold(
            || vec![0u64; probes.len()],
            |mut hits, trial| -> Result<Vec<u64>> {
                let mut rng = trial_rng(trial_seed(master, trial));
                let mut state = AlgoState::new(t);
                let mut next = 0;
                for (i, &e) in t.events.iter().enumerate() {
                    serve(Algorithm::Rand, &mut state, e, t, &mut rng)?;
                    while next < probes.len() && probes[next].event == i {
                        let p = &probes[next];
                        if state.current.precedes(p.first, p.second) {
                            hits[next] += 1;
                        }
                        next += 1;
                    }
                }
                Ok(hits)
            },
        )
        .try_reduce(
            || vec![0u64; probes.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok(probes
        .into_iter()
        .zip(hits)
        .map(|(p, h)| {
            let (z, pass) = binomial_check(p.expected, h, trials);
            FrequencyCheck {
                trace: index,
                event: p.event,
                label: p.label,
                expected_num: *p.expected.numer(),
                expected_den: *p.expected.denom(),
                hits: h,
                trials,
                z,
                pass,
            }
        })
        .collect())
}

/// Random series of length at most 50 with terms in `1..=20`, plus the
/// boundary series `[1, 1]`.
fn harmonic_sweep(instances: u64, seed: u64) -> Result<SweepSummary> {
    let mut rng = trial_rng(seed);
    let mut series = vec![vec![1, 1], vec![2, 3]];
    while (series.len() as u64) < instances {
        let len = rng.random_range(1..=50);
        series.push((0..len).map(|_| rng.random_range(1..=20u64)).collect());
    }
    let mut summary = SweepSummary {
        instances: series.len() as u64,
        failures: 0,
        first_failure: None,
    };
    for s in &series {
        let b = check_harmonic_bounds(s)?;
        if !b.all_hold() {
            summary.failures += 1;
            summary
                .first_failure
                .get_or_insert_with(|| format!("series {s:?}: {b:?}"));
        }
    }
    Ok(summary)
}

/// Random nonnegative `a` and probabilities `b` with `N <= 10`, plus two
/// pinned small cases.
fn identity_sweep(instances: u64, seed: u64) -> Result<SweepSummary> {
    let mut rng = trial_rng(seed);
    let mut cases: Vec<(Vec<f64>, Vec<f64>)> = vec![(vec![2.5], vec![0.3]), (vec![1.0, 6.0, 3.0], vec![0.5; 3])];
    while (cases.len() as u64) < instances {
        let n = rng.random_range(1..=10);
        let a = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let b = (0..n).map(|_| rng.random::<f64>()).collect();
        cases.push((a, b));
    }
    let mut summary = SweepSummary {
        instances: cases.len() as u64,
        failures: 0,
        first_failure: None,
    };
    for (a, b) in &cases {
        let c = check_identity_lemmas(a, b)?;
        if !(c.expectation_holds && c.cross_holds) {
            summary.failures += 1;
            summary
                .first_failure
                .get_or_insert_with(|| format!("a = {a:?}, b = {b:?}: {c:?}"));
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: LemmaKind, trials: u64) -> VerifyConfig {
        VerifyConfig {
            kind,
            trials,
            seed: 1,
            traces: vec![],
        }
    }

    #[test]
    fn too_few_trials() {
        assert!(matches!(verify_lemma(&cfg(LemmaKind::Harmonic, 999)), Err(Error::Config(_))));
    }

    #[test]
    fn binomial_rule() {
        assert_eq!(binomial_check(Ratio::new(0, 1), 0, 1000), (0.0, true));
        assert!(!binomial_check(Ratio::new(0, 1), 1, 1000).1);
        assert!(binomial_check(Ratio::new(1, 1), 1000, 1000).1);
        assert!(!binomial_check(Ratio::new(1, 1), 999, 1000).1);
        assert!(binomial_check(Ratio::new(1, 2), 510, 1000).1);
        // 0.5 +- 4 * 0.0158
        assert!(!binomial_check(Ratio::new(1, 2), 570, 1000).1);
    }

    #[test]
    fn small_clique_probe() {
        let t = &default_traces(Model::Cliques)[0];
        let p = probes(LemmaKind::LeftRight, t).unwrap();
        // after (0,2): {0,2} against {1}; after (0,1) nothing is left
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].expected, Ratio::new(1, 2));
        assert_eq!(p[0].label, "{0,2} --- {1}");
    }

    #[test]
    fn two_node_path_never_forward() {
        let report = verify_lemma(&VerifyConfig {
            traces: vec![default_traces(Model::Lines)[0].clone()],
            ..cfg(LemmaKind::Orientation, 1000)
        })
        .unwrap();
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].hits, 0);
        assert!(report.passed);
    }

    #[test]
    fn wrong_model_rejected() {
        let lines = default_traces(Model::Lines);
        let r = verify_lemma(&VerifyConfig {
            traces: lines,
            ..cfg(LemmaKind::LeftRight, 1000)
        });
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn sweeps_pass() {
        assert!(verify_lemma(&cfg(LemmaKind::Harmonic, 1000)).unwrap().passed);
        assert!(verify_lemma(&cfg(LemmaKind::Identities, 1000)).unwrap().passed);
    }

    #[test]
    fn parse_kinds() {
        for k in ["left-right", "orientation", "harmonic", "identities"] {
            assert_eq!(k.parse::<LemmaKind>().unwrap().to_string(), k);
        }
        assert!("lemma1".parse::<LemmaKind>().is_err());
    }
}

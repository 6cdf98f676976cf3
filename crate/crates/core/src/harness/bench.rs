//! The benchmark suite: eleven finite-size checks of the competitive
//! bounds, the probability lemmas and the oracles. Each check returns a
//! [`CriterionOutcome`]; nothing here panics on a failed check.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;

use super::duel::duel_middle_line;
use super::experiment::{run_experiment, trace_id, ExperimentConfig, OutputFormat, TraceSource};
use super::verify::{verify_lemma, LemmaKind, VerifyConfig, VerifyReport};
use super::{trial_seed, TOOL_VERSION};
use crate::adversaries::{random_trace_with_events, tree_adversary, TreeAdversaryConfig};
use crate::algorithms::{run, serve, trial_rng, AlgoState, Algorithm, Choice, Mover, Orientation, RNG_NAME};
use crate::error::Result;
use crate::feasibility::{arrangement_cost, is_minla, minla_optimum};
use crate::instance::{emit_trace, replay_components, Model, RevealEvent, RevealTrace};
use crate::oracle::{all_orders, bound_factor, dp_opt, exhaustive_opt, harmonic_f64};
use crate::perm::Permutation;

/// Master seed of the whole suite; every criterion derives its own stream.
pub const SUITE_SEED: u64 = 0x4d49_4e4c_4120_3031;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Optional CSV table (header first) written next to the summary.
    #[serde(skip)]
    pub table: Vec<String>,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(id: u32, name: &'static str, body: impl FnOnce() -> Result<(bool, String, Vec<String>)>) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let (passed, detail, table) = body()?;
    Ok(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
        table,
    })
}

fn model_salt(model: Model) -> u64 {
    match model {
        Model::Cliques => 0,
        Model::Lines => 1 << 32,
    }
}

/// Random trace `i` of a sweep: `n` cycles through `sizes`, the number of
/// events varies so that some traces end with several components.
fn sweep_trace(criterion: u64, model: Model, i: u64, sizes: std::ops::RangeInclusive<usize>) -> RevealTrace {
    let span = (sizes.end() - sizes.start() + 1) as u64;
    let n = sizes.start() + (i % span) as usize;
    let k = n.saturating_sub(1).saturating_sub((i / span) as usize % (n / 2 + 1));
    let seed = trial_seed(trial_seed(SUITE_SEED, criterion) ^ model_salt(model), i);
    random_trace_with_events(model, n, k, seed)
}

/// `Det` never pays more than `2(n-1)` times the optimum.
pub fn det_upper_bound(traces_per_model: u64) -> Result<CriterionOutcome> {
    timed(1, "DET upper bound", || {
        let mut violations = Vec::new();
        let mut worst = 0.0f64;
        let mut table = vec!["model,n,k,trace_id,det_cost,opt_cost,limit".to_string()];
        for model in [Model::Cliques, Model::Lines] {
            for i in 0..traces_per_model {
                let t = sweep_trace(1, model, i, 4..=16);
                let det = run(Algorithm::Det, &t, 0)?.cumulative_cost;
                let opt = dp_opt(&t)?.cost;
                let limit = 2 * (t.n as u64 - 1) * opt;
                table.push(format!("{model},{},{},{},{det},{opt},{limit}", t.n, t.k(), trace_id(&t)));
                let ok = if opt > 0 { det <= limit } else { det == 0 };
                if opt > 0 {
                    worst = worst.max(det as f64 / limit as f64);
                }
                if !ok {
                    violations.push(emit_trace(&t));
                }
            }
        }
        let detail = format!(
            "{} traces, {} violations, max cost/(2(n-1)opt) = {worst:.4}",
            2 * traces_per_model,
            violations.len()
        );
        let detail = match violations.first() {
            Some(t) => format!("{detail}; first violation:\n{t}"),
            None => detail,
        };
        Ok((violations.is_empty(), detail, table))
    })
}

/// Middle-line duels: `Det` pays quadratically while the optimum stays
/// linear.
pub fn det_lower_bound() -> Result<CriterionOutcome> {
    timed(2, "DET lower bound", || {
        let mut table = vec!["n,det_cost,opt_cost,ratio,alternations".to_string()];
        let mut reports = Vec::new();
        for n in [9, 13, 17] {
            let d = duel_middle_line(n)?;
            table.push(format!(
                "{n},{},{},{:.6},{}",
                d.det_cost,
                d.opt.cost,
                d.ratio_f64().unwrap_or(f64::NAN),
                d.alternations
            ));
            reports.push(d);
        }
        let (a, c) = (&reports[0], &reports[2]);
        let cost_growth = c.det_cost as f64 / a.det_cost as f64;
        let opt_small = reports.iter().all(|d| d.opt.cost > 0 && d.opt.cost <= d.n as u64);
        let ratios: Vec<Ratio<u64>> = reports.iter().filter_map(|d| d.ratio).collect();
        let increasing = ratios.len() == 3 && ratios.windows(2).all(|w| w[0] < w[1]);
        let ratio_growth = if ratios.len() == 3 {
            let r = ratios[2] / ratios[0];
            *r.numer() as f64 / *r.denom() as f64
        } else {
            0.0
        };
        let passed = cost_growth >= 2.5 && opt_small && increasing && ratio_growth >= 1.5;
        let detail = format!(
            "costs {:?}, opt {:?}, cost(17)/cost(9) = {cost_growth:.3}, ratio(17)/ratio(9) = {ratio_growth:.3}",
            reports.iter().map(|d| d.det_cost).collect::<Vec<_>>(),
            reports.iter().map(|d| d.opt.cost).collect::<Vec<_>>(),
        );
        Ok((passed, detail, table))
    })
}

/// Mean cost of `Rand` against `factor * H_n * opt` on random traces.
fn rand_bound(id: u32, name: &'static str, model: Model, traces: u64, trials: u64) -> Result<CriterionOutcome> {
    timed(id, name, || {
        let mut table = vec!["n,trace_id,opt_cost,mean,std_error,bound,mean_over_bound".to_string()];
        let mut failures = Vec::new();
        let mut worst = 0.0f64;
        for n in [8usize, 16, 32, 64] {
            for i in 0..traces {
                let seed = trial_seed(trial_seed(SUITE_SEED, id as u64), (n as u64) << 20 | i);
                let cfg = ExperimentConfig {
                    source: TraceSource::Random { model, n, seed },
                    algo: Algorithm::Rand,
                    trials,
                    master_seed: seed,
                    format: OutputFormat::Csv,
                    out: None,
                };
                let e = run_experiment(&cfg)?;
                let bound = bound_factor(model) * harmonic_f64(n as u64) * e.opt.cost as f64;
                let ok = if e.opt.cost > 0 {
                    e.stats.mean < bound
                } else {
                    e.stats.max == 0
                };
                let frac = if bound > 0.0 { e.stats.mean / bound } else { 0.0 };
                worst = worst.max(frac);
                table.push(format!(
                    "{n},{},{},{:.6},{:.6},{bound:.6},{frac:.6}",
                    e.trace_id, e.opt.cost, e.stats.mean, e.stats.std_error
                ));
                if !ok {
                    failures.push(format!("n = {n}, trace {}", e.trace_id));
                }
            }
        }
        let detail = format!(
            "{} traces x {trials} trials, {} above bound, max mean/bound = {worst:.4}",
            4 * traces,
            failures.len()
        );
        Ok((failures.is_empty(), detail, table))
    })
}

pub fn rand_cliques_bound(traces: u64, trials: u64) -> Result<CriterionOutcome> {
    rand_bound(3, "RAND cliques bound", Model::Cliques, traces, trials)
}

pub fn rand_lines_bound(traces: u64, trials: u64) -> Result<CriterionOutcome> {
    rand_bound(4, "RAND lines bound", Model::Lines, traces, trials)
}

fn frequency(id: u32, name: &'static str, kind: LemmaKind, trials: u64) -> Result<CriterionOutcome> {
    timed(id, name, || {
        let report = verify_lemma(&VerifyConfig {
            kind,
            trials,
            seed: trial_seed(SUITE_SEED, id as u64),
            traces: vec![],
        })?;
        Ok((report.passed, frequency_detail(&report), frequency_table(&report)))
    })
}

fn frequency_detail(r: &VerifyReport) -> String {
    let traces = r.checks.iter().map(|c| c.trace).max().map_or(0, |m| m + 1);
    let mut s = format!(
        "{traces} traces x {} trials, {} tracked events, {} outside 4 sigma, max |z| = {:.3}",
        r.trials,
        r.checks.len(),
        r.failures(),
        r.worst_z()
    );
    if let Some(c) = r.checks.iter().find(|c| !c.pass) {
        s.push_str(&format!(
            "; first failure: trace {} event {} {} expected {}/{} observed {}/{}",
            c.trace, c.event, c.label, c.expected_num, c.expected_den, c.hits, c.trials
        ));
    }
    s
}

fn frequency_table(r: &VerifyReport) -> Vec<String> {
    let mut t = vec!["trace,event,label,expected,hits,trials,z,pass".to_string()];
    t.extend(r.checks.iter().map(|c| {
        format!(
            "{},{},\"{}\",{}/{},{},{},{:.4},{}",
            c.trace, c.event, c.label, c.expected_num, c.expected_den, c.hits, c.trials, c.z, c.pass
        )
    }));
    t
}

pub fn left_right_frequencies(trials: u64) -> Result<CriterionOutcome> {
    frequency(5, "left-right frequencies", LemmaKind::LeftRight, trials)
}

pub fn orientation_frequencies(trials: u64) -> Result<CriterionOutcome> {
    frequency(6, "orientation frequencies", LemmaKind::Orientation, trials)
}

/// The dynamic-programming optimum agrees with brute force on small traces.
pub fn oracle_equivalence(per_model: u64, at_seven: u64) -> Result<CriterionOutcome> {
    timed(7, "oracle equivalence", || {
        let mut gaps = Vec::new();
        let mut checked = 0;
        let mut table = vec!["model,n,k,trace_id,dp_opt,exhaustive_opt".to_string()];
        for model in [Model::Cliques, Model::Lines] {
            let small = (0..per_model).map(|i| sweep_trace(7, model, i, 2..=6));
            let seven = (0..at_seven).map(|i| sweep_trace(7, model, per_model + i, 7..=7));
            for t in small.chain(seven) {
                let dp = dp_opt(&t)?;
                let ex = exhaustive_opt(&t)?;
                checked += 1;
                table.push(format!("{model},{},{},{},{},{}", t.n, t.k(), trace_id(&t), dp.cost, ex.cost));
                if dp.cost != ex.cost {
                    gaps.push(format!(
                        "dp {} vs exhaustive {} (witness {}) on\n{}",
                        dp.cost,
                        ex.cost,
                        ex.witness,
                        emit_trace(&t)
                    ));
                }
            }
        }
        let mut detail = format!("{checked} traces, {} gaps", gaps.len());
        if let Some(g) = gaps.first() {
            detail.push_str(&format!("; first gap: {g}"));
        }
        Ok((gaps.is_empty(), detail, table))
    })
}

/// The contiguity test agrees with cost minimality over all `n!` orders.
pub fn feasibility_characterization(per_model: u64) -> Result<CriterionOutcome> {
    timed(8, "feasibility characterization", || {
        let mut mismatches = Vec::new();
        let mut perms = 0u64;
        for model in [Model::Cliques, Model::Lines] {
            for i in 0..per_model {
                let t = sweep_trace(8, model, i, 1..=7);
                let k = (i as usize * 7 + 3) % (t.k() + 1);
                let parts = replay_components(&t, k)?;
                let orders = all_orders(t.n);
                let costs: Vec<u64> = orders
                    .iter()
                    .map(|o| arrangement_cost(&Permutation::from_order(o.clone()).expect("enumerated"), &parts))
                    .collect();
                let min = *costs.iter().min().expect("at least one order");
                if min != minla_optimum(&parts) {
                    mismatches.push(format!("closed-form optimum {} vs {min}", minla_optimum(&parts)));
                }
                for (o, &c) in orders.iter().zip(&costs) {
                    perms += 1;
                    let p = Permutation::from_order(o.clone()).expect("enumerated");
                    if is_minla(&p, &parts) != (c == min) {
                        mismatches.push(format!("{model} order {p} after {k} events of\n{}", emit_trace(&t)));
                    }
                }
            }
        }
        let mut detail = format!("{} partitions, {perms} permutations, {} mismatches", 2 * per_model, mismatches.len());
        if let Some(m) = mismatches.first() {
            detail.push_str(&format!("; first: {m}"));
        }
        Ok((mismatches.is_empty(), detail, Vec::new()))
    })
}

/// Mean `Rand` cost over mean optimum on the random binary-tree
/// distribution lies between `log2(n)/16` and `8 H_n` and grows with `n`.
pub fn tree_sandwich(samples: u64) -> Result<CriterionOutcome> {
    timed(9, "randomized lower-bound sandwich", || {
        let mut table = vec!["n,samples,mean_rand,mean_opt,ratio,lower,upper".to_string()];
        let mut ratios = Vec::new();
        let mut inside = true;
        for q in [4u32, 6, 8] {
            let n = 1usize << q;
            let pi0 = Permutation::identity(n);
            let (mut rand_sum, mut opt_sum) = (0u64, 0u64);
            for j in 0..samples {
                let seed = trial_seed(trial_seed(SUITE_SEED, 9) ^ q as u64, j);
                let t = tree_adversary(TreeAdversaryConfig { q, seed }, &pi0)?;
                opt_sum += dp_opt(&t)?.cost;
                rand_sum += run(Algorithm::Rand, &t, trial_seed(seed, 1))?.cumulative_cost;
            }
            let ratio = rand_sum as f64 / opt_sum as f64;
            let lower = q as f64 / 16.0;
            let upper = 8.0 * harmonic_f64(n as u64);
            inside &= lower <= ratio && ratio <= upper;
            table.push(format!(
                "{n},{samples},{:.4},{:.4},{ratio:.6},{lower:.4},{upper:.4}",
                rand_sum as f64 / samples as f64,
                opt_sum as f64 / samples as f64
            ));
            ratios.push(ratio);
        }
        let increasing = ratios.windows(2).all(|w| w[0] < w[1]);
        let detail = format!(
            "ratios at n = 16, 64, 256: {:.4}, {:.4}, {:.4}; within bounds: {inside}; increasing: {increasing}",
            ratios[0], ratios[1], ratios[2]
        );
        Ok((inside && increasing, detail, table))
    })
}

/// Harmonic-sum inequalities and the two identities over random instances.
pub fn algebraic_lemmas(instances: u64) -> Result<CriterionOutcome> {
    timed(10, "algebraic lemmas", || {
        let mut parts = Vec::new();
        let mut passed = true;
        for kind in [LemmaKind::Harmonic, LemmaKind::Identities] {
            let r = verify_lemma(&VerifyConfig {
                kind,
                trials: instances,
                seed: trial_seed(SUITE_SEED, 10) ^ kind as u64,
                traces: vec![],
            })?;
            let s = r.sweep.as_ref().expect("sweep kinds report a sweep");
            passed &= r.passed;
            let mut text = format!("{kind}: {} instances, {} failures", s.instances, s.failures);
            if let Some(f) = &s.first_failure {
                text.push_str(&format!(" (first: {f})"));
            }
            parts.push(text);
        }
        Ok((passed, parts.join("; "), Vec::new()))
    })
}

/// Runs `Rand` over `events` from the start of `t` and returns the report of
/// the last step.
fn last_step(t: &RevealTrace, seed: u64) -> Result<(Permutation, crate::algorithms::StepReport)> {
    let mut state = AlgoState::new(t);
    let mut rng = trial_rng(seed);
    for &e in &t.events {
        serve(Algorithm::Rand, &mut state, e, t, &mut rng)?;
    }
    let report = state.step_log.last().expect("at least one event").clone();
    Ok((state.current, report))
}

fn trace_of(model: Model, pairs: &[(usize, usize)]) -> Result<RevealTrace> {
    RevealTrace::new(
        model,
        Permutation::identity(5),
        pairs.iter().map(|&(u, v)| RevealEvent::new(u, v)).collect(),
    )
}

/// The two worked examples: a clique merge with coin 2/3 against 1/3 and a
/// path merge with orientation coin 9/10 against 1/10.
pub fn coin_examples() -> Result<CriterionOutcome> {
    timed(11, "worked coin examples", || {
        let mut problems = Vec::new();
        let half = |b: bool, what: &str, problems: &mut Vec<String>| {
            if !b {
                problems.push(what.to_string());
            }
        };

        // x = 0 alone, Y = {1, 2}, Z = {3, 4}; the request joins x and Z
        let clique_case = trace_of(Model::Cliques, &[(1, 2), (3, 4), (0, 3)])?;
        let mut seen = [false; 2];
        for seed in 0..256 {
            let (perm, r) = last_step(&clique_case, seed)?;
            let Choice::Move { mover, coin } = r.choice else {
                problems.push(format!("clique step logged {}", r.choice));
                break;
            };
            half(
                coin.probability(Mover::X) == Ratio::new(2, 3) && coin.probability(Mover::Z) == Ratio::new(1, 3),
                "clique coin is not 2/3 against 1/3",
                &mut problems,
            );
            let (expect, cost): (&[usize], u64) = match mover {
                Mover::X => (&[1, 2, 0, 3, 4], 2),
                Mover::Z => (&[0, 3, 4, 1, 2], 4),
            };
            half(
                perm.as_slice() == expect && r.move_cost == cost && r.probability == coin.probability(mover),
                "clique step outcome mismatch",
                &mut problems,
            );
            seen[(mover == Mover::Z) as usize] = true;
        }
        half(seen == [true, true], "clique coin never showed both sides", &mut problems);

        // X = path (0,1), Z = path (2,3,4); the request joins 0 and 2
        let line_case = trace_of(Model::Lines, &[(0, 1), (2, 3), (3, 4), (0, 2)])?;
        let mut seen = [false; 2];
        for seed in 0..256 {
            let (perm, r) = last_step(&line_case, seed)?;
            let Choice::MoveOrient {
                orientation, weights, ..
            } = r.choice
            else {
                problems.push(format!("line step logged {}", r.choice));
                break;
            };
            half(
                weights.probability(Orientation::Forward) == Ratio::new(9, 10)
                    && weights.probability(Orientation::Reversed) == Ratio::new(1, 10),
                "orientation coin is not 9/10 against 1/10",
                &mut problems,
            );
            let (expect, cost): (&[usize], u64) = match orientation {
                Orientation::Forward => (&[1, 0, 2, 3, 4], 1),
                Orientation::Reversed => (&[4, 3, 2, 0, 1], 9),
            };
            half(
                perm.as_slice() == expect && r.rearrange_cost == cost && r.move_cost == 0,
                "line step outcome mismatch",
                &mut problems,
            );
            seen[(orientation == Orientation::Reversed) as usize] = true;
        }
        half(seen == [true, true], "orientation coin never showed both sides", &mut problems);

        problems.dedup();
        let detail = if problems.is_empty() {
            "clique coin 2/3 | 1/3 and orientation coin 9/10 | 1/10 reproduced with both outcomes".to_string()
        } else {
            problems.join("; ")
        };
        Ok((problems.is_empty(), detail, Vec::new()))
    })
}

/// Full-size parameters of every criterion.
pub fn run_suite() -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        det_upper_bound(500)?,
        det_lower_bound()?,
        rand_cliques_bound(20, 10_000)?,
        rand_lines_bound(20, 10_000)?,
        left_right_frequencies(100_000)?,
        orientation_frequencies(100_000)?,
        oracle_equivalence(200, 20)?,
        feasibility_characterization(50)?,
        tree_sandwich(1_000)?,
        algebraic_lemmas(10_000)?,
        coin_examples()?,
    ])
}

#[derive(Serialize)]
struct Summary<'a> {
    tool: &'a str,
    rng: &'a str,
    suite_seed: u64,
    passed: bool,
    criteria: &'a [CriterionOutcome],
}

/// Writes `summary.json`, `summary.txt` and one CSV per criterion that
/// produced a table.
pub fn write_suite(dir: &Path, outcomes: &[CriterionOutcome]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = Summary {
        tool: TOOL_VERSION,
        rng: RNG_NAME,
        suite_seed: SUITE_SEED,
        passed: outcomes.iter().all(|o| o.passed),
        criteria: outcomes,
    };
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    let text: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
    fs::write(dir.join("summary.txt"), text)?;
    for o in outcomes.iter().filter(|o| !o.table.is_empty()) {
        fs::write(dir.join(format!("criterion_{:02}.csv", o.id)), o.table.join("\n") + "\n")?;
    }
    Ok(())
}

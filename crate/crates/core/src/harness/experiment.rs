use std::fmt;
use std::fs;
use std::hash::Hasher;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fnv::FnvHasher;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::stats::{StatsAccumulator, TrialStats};
use super::{format_ratio, trial_seed, TOOL_VERSION};
use crate::adversaries::{random_trace, tree_adversary, TreeAdversaryConfig};
use crate::algorithms::{run, Algorithm, RNG_NAME};
use crate::error::{Error, Result};
use crate::instance::{emit_trace, parse_trace, Model, RevealTrace};
use crate::oracle::{dp_opt, OptResult};
use crate::perm::Permutation;

pub const CSV_HEADER: &str = "trace_id,algo,n,trial,cost_move,cost_rearrange,cost_total,opt_cost,ratio,seed";

/// Where the trace of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceSource {
    File(PathBuf),
    Random { model: Model, n: usize, seed: u64 },
    Tree { q: u32, seed: u64 },
    Given(RevealTrace),
}

impl TraceSource {
    pub fn load(&self) -> Result<RevealTrace> {
        match self {
            TraceSource::File(path) => parse_trace(&fs::read_to_string(path)?),
            TraceSource::Random { model, n, seed } => Ok(random_trace(*model, *n, *seed)),
            TraceSource::Tree { q, seed } => {
                let n = 1usize
                    .checked_shl(*q)
                    .ok_or_else(|| Error::Config(format!("tree depth {q} too large")))?;
                tree_adversary(TreeAdversaryConfig { q: *q, seed: *seed }, &Permutation::identity(n))
            }
            TraceSource::Given(t) => Ok(t.clone()),
        }
    }

    fn describe(&self) -> String {
        match self {
            TraceSource::File(p) => format!("file:{}", p.display()),
            TraceSource::Random { model, n, seed } => format!("random:{model}:n={n}:seed={seed}"),
            TraceSource::Tree { q, seed } => format!("tree:q={q}:seed={seed}"),
            TraceSource::Given(_) => "inline".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}', expected csv or json")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub source: TraceSource,
    pub algo: Algorithm,
    pub trials: u64,
    pub master_seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// One row of the experiment table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trace_id: String,
    pub algo: Algorithm,
    pub n: usize,
    pub trial: u64,
    pub cost_move: u64,
    pub cost_rearrange: u64,
    pub cost_total: u64,
    pub opt_cost: u64,
    /// `cost_total / opt_cost`, `None` when the optimum is zero.
    #[serde(serialize_with = "ratio_field")]
    pub ratio: Option<Ratio<u64>>,
    pub seed: u64,
}

fn ratio_field<S: serde::Serializer>(r: &Option<Ratio<u64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&ratio_text(*r))
}

fn ratio_text(r: Option<Ratio<u64>>) -> String {
    r.map_or_else(|| "NA".to_string(), |r| format_ratio(r, 6))
}

impl TrialRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.trace_id,
            self.algo,
            self.n,
            self.trial,
            self.cost_move,
            self.cost_rearrange,
            self.cost_total,
            self.opt_cost,
            ratio_text(self.ratio),
            self.seed
        )
    }
}

/// Everything one experiment produced.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub trace: RevealTrace,
    pub trace_id: String,
    pub opt: OptResult,
    pub stats: TrialStats,
    pub records: Vec<TrialRecord>,
}

/// 64-bit FNV-1a of the canonical trace text, as 16 hex digits.
pub fn trace_id(t: &RevealTrace) -> String {
    let mut h = FnvHasher::default();
    h.write(emit_trace(t).as_bytes());
    format!("{:016x}", h.finish())
}

/// Runs `cfg.trials` independent trials of `cfg.algo`. Trials may execute in
/// parallel; records come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let trace = cfg.source.load()?;
    let opt = dp_opt(&trace)?;
    let id = trace_id(&trace);
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.master_seed, trial);
            let state = run(cfg.algo, &trace, seed)?;
            let (cost_move, cost_rearrange) = (state.move_cost(), state.rearrange_cost());
            let cost_total = cost_move + cost_rearrange;
            Ok(TrialRecord {
                trace_id: id.clone(),
                algo: cfg.algo,
                n: trace.n,
                trial,
                cost_move,
                cost_rearrange,
                cost_total,
                opt_cost: opt.cost,
                ratio: (opt.cost > 0).then(|| Ratio::new(cost_total, opt.cost)),
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = StatsAccumulator::new();
    for r in &records {
        acc.push(r.cost_move, r.cost_rearrange);
    }
    Ok(Experiment {
        trace,
        trace_id: id,
        opt,
        stats: acc.finish(),
        records,
    })
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'a str,
    rng: &'a str,
    seed_derivation: &'a str,
    source: String,
    algo: Algorithm,
    trials: u64,
    master_seed: u64,
    trace_id: &'a str,
    model: &'a str,
    n: usize,
    events: usize,
    opt: &'a OptResult,
    stats: &'a TrialStats,
    /// Trials whose ratio is undefined because the optimum is zero.
    na_ratios: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    meta: Meta<'a>,
    records: &'a [TrialRecord],
}

impl Experiment {
    fn meta<'a>(&'a self, cfg: &ExperimentConfig) -> Meta<'a> {
        Meta {
            tool: TOOL_VERSION,
            rng: RNG_NAME,
            seed_derivation: "splitmix64 stream at master_seed, element trial",
            source: cfg.source.describe(),
            algo: cfg.algo,
            trials: cfg.trials,
            master_seed: cfg.master_seed,
            trace_id: &self.trace_id,
            model: self.trace.model.as_str(),
            n: self.trace.n,
            events: self.trace.k(),
            opt: &self.opt,
            stats: &self.stats,
            na_ratios: self.records.iter().filter(|r| r.ratio.is_none()).count() as u64,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn meta_json(&self, cfg: &ExperimentConfig) -> String {
        serde_json::to_string_pretty(&self.meta(cfg)).expect("plain struct serializes") + "\n"
    }

    pub fn to_json(&self, cfg: &ExperimentConfig) -> String {
        let report = JsonReport {
            meta: self.meta(cfg),
            records: &self.records,
        };
        serde_json::to_string_pretty(&report).expect("plain struct serializes") + "\n"
    }

    /// Renders the report in `cfg.format`. CSV output written to a file gets
    /// a `<file>.meta.json` sidecar with the configuration and summary.
    pub fn write(&self, cfg: &ExperimentConfig) -> Result<Option<String>> {
        let body = match cfg.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(cfg),
        };
        match &cfg.out {
            None => Ok(Some(body)),
            Some(path) => {
                fs::write(path, body)?;
                if cfg.format == OutputFormat::Csv {
                    fs::write(sidecar_path(path), self.meta_json(cfg))?;
                }
                Ok(None)
            }
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::RevealEvent;

    fn cfg(source: TraceSource, algo: Algorithm, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            source,
            algo,
            trials,
            master_seed: 11,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    #[test]
    fn empty_trace_reports_na() {
        let t = RevealTrace::new(Model::Lines, Permutation::identity(4), vec![]).unwrap();
        let e = run_experiment(&cfg(TraceSource::Given(t), Algorithm::Det, 1)).unwrap();
        assert_eq!(e.records.len(), 1);
        assert_eq!(e.records[0].cost_total, 0);
        assert!(e.records[0].csv_line().contains(",0,0,NA,"));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let src = TraceSource::Random {
            model: Model::Lines,
            n: 9,
            seed: 4,
        };
        let a = run_experiment(&cfg(src.clone(), Algorithm::Rand, 2)).unwrap();
        let b = run_experiment(&cfg(src, Algorithm::Rand, 2)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with(CSV_HEADER));
    }

    #[test]
    fn more_trials_extend_without_perturbing() {
        let src = TraceSource::Random {
            model: Model::Cliques,
            n: 10,
            seed: 2,
        };
        let a = run_experiment(&cfg(src.clone(), Algorithm::Rand, 3)).unwrap();
        let b = run_experiment(&cfg(src, Algorithm::Rand, 6)).unwrap();
        assert_eq!(a.records[..], b.records[..3]);
    }

    #[test]
    fn ratio_is_exact() {
        let t = RevealTrace::new(
            Model::Cliques,
            Permutation::from_order(vec![0, 1, 2]).unwrap(),
            vec![RevealEvent::new(0, 2), RevealEvent::new(0, 1)],
        )
        .unwrap();
        let e = run_experiment(&cfg(TraceSource::Given(t), Algorithm::Det, 1)).unwrap();
        let r = &e.records[0];
        assert_eq!(r.opt_cost, 1);
        assert_eq!(r.ratio, Some(Ratio::new(r.cost_total, 1)));
    }

    #[test]
    fn rejects_zero_trials() {
        let t = RevealTrace::new(Model::Lines, Permutation::identity(2), vec![]).unwrap();
        assert!(matches!(
            run_experiment(&cfg(TraceSource::Given(t), Algorithm::Det, 0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.meta.json"));
    }
}

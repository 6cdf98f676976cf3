use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use minla::adversaries::{random_trace, tree_adversary, TreeAdversaryConfig};
use minla::algorithms::Algorithm;
use minla::harness::bench::{run_suite, write_suite};
use minla::harness::{duel_middle_line, run_experiment, verify_lemma, ExperimentConfig, LemmaKind, OutputFormat, TraceSource, VerifyConfig};
use minla::instance::{emit_trace, parse_trace};
use minla::oracle::{dp_opt, exhaustive_opt};
use minla::{Error, Model, Permutation, Result, RevealTrace};

#[derive(Parser)]
#[command(name = "minla", version, about = "Online minimum linear arrangement for cliques and lines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryKind {
    MiddleLine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reveal trace.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an online algorithm on a trace for many seeded trials.
    Simulate {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Offline optimum of a trace.
    Opt {
        #[arg(long)]
        trace: PathBuf,
        /// Brute force over every schedule (n <= 7).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Check a lemma empirically or by sweep.
    Verify {
        #[arg(long)]
        lemma: LemmaKind,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Play an online algorithm against an adaptive adversary.
    Duel {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, value_enum)]
        adversary: AdversaryKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dump_trace: Option<PathBuf>,
    },
    /// Run the benchmark suite and write its reports.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_trace(path: &Path) -> Result<RevealTrace> {
    parse_trace(&fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct OptReport {
    method: &'static str,
    model: Model,
    n: usize,
    events: usize,
    #[serde(flatten)]
    opt: minla::oracle::OptResult,
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            kind,
            model,
            n,
            seed,
            out,
        } => {
            let trace = match kind {
                GenKind::Random => random_trace(model, n, seed),
                GenKind::Tree => {
                    if model != Model::Lines {
                        return Err(Error::Config("tree traces reveal a path, use --model lines".into()));
                    }
                    if !n.is_power_of_two() || n < 2 {
                        return Err(Error::NotPowerOfTwo(n));
                    }
                    let cfg = TreeAdversaryConfig {
                        q: n.trailing_zeros(),
                        seed,
                    };
                    tree_adversary(cfg, &Permutation::identity(n))?
                }
            };
            emit(out.as_deref(), &emit_trace(&trace))?;
        }
        Command::Simulate {
            algo,
            trace,
            seed,
            trials,
            format,
            out,
        } => {
            let cfg = ExperimentConfig {
                source: TraceSource::File(trace),
                algo,
                trials,
                master_seed: seed,
                format,
                out,
            };
            let experiment = run_experiment(&cfg)?;
            if let Some(text) = experiment.write(&cfg)? {
                emit(None, &text)?;
            }
        }
        Command::Opt { trace, exhaustive } => {
            let t = read_trace(&trace)?;
            let (method, opt) = if exhaustive {
                ("exhaustive", exhaustive_opt(&t)?)
            } else {
                ("dp", dp_opt(&t)?)
            };
            let report = OptReport {
                method,
                model: t.model,
                n: t.n,
                events: t.k(),
                opt,
            };
            emit(None, &json(&report)?)?;
        }
        Command::Verify {
            lemma,
            trials,
            seed,
            trace,
        } => {
            let traces = match trace {
                Some(path) => vec![read_trace(&path)?],
                None => Vec::new(),
            };
            let report = verify_lemma(&VerifyConfig {
                kind: lemma,
                trials,
                seed,
                traces,
            })?;
            emit(None, &json(&report)?)?;
            if !report.passed {
                return Err(Error::Verification(format!("{} check(s) failed for {lemma}", report.failures())));
            }
        }
        Command::Duel {
            algo,
            adversary: AdversaryKind::MiddleLine,
            n,
            dump_trace,
        } => {
            if algo != Algorithm::Det {
                return Err(Error::Config("the middle-line adversary plays against det only".into()));
            }
            let report = duel_middle_line(n)?;
            if let Some(path) = dump_trace {
                fs::write(path, emit_trace(&report.trace))?;
            }
            emit(None, &report.to_json())?;
        }
        Command::Bench { suite: Suite::Paper, out } => {
            let outcomes = run_suite()?;
            write_suite(&out, &outcomes)?;
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Err(Error::Verification("benchmark suite has failing criteria".into()));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn minla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minla"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let o = minla(&["gen", "--kind", "random", "--model", "lines", "--n", "10", "--seed", "5", "--out", p(&trace)]);
    assert!(o.status.success());
    let args = ["simulate", "--algo", "rand", "--trace", p(&trace), "--seed", "9", "--trials", "4", "--format", "csv"];
    let a = minla(&args);
    let b = minla(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trace_id,algo,n,trial,cost_move,cost_rearrange,cost_total,opt_cost,ratio,seed"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn csv_to_file_writes_metadata_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let out = dir.path().join("run.csv");
    minla(&["gen", "--kind", "tree", "--model", "lines", "--n", "8", "--seed", "1", "--out", p(&trace)]);
    let o = minla(&[
        "simulate", "--algo", "det", "--trace", p(&trace), "--seed", "3", "--trials", "2", "--format", "csv", "--out", p(&out),
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["master_seed"], 3);
    assert_eq!(meta["algo"], "det");
    assert!(meta["tool"].as_str().unwrap().starts_with("minla "));
    assert!(meta["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn empty_trace_ratio_is_na() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    fs::write(&trace, "minla-trace v1\nmodel: cliques\nn: 3\npi0: 0 1 2\n").unwrap();
    let o = minla(&["simulate", "--algo", "det", "--trace", p(&trace), "--seed", "0", "--trials", "1", "--format", "csv"]);
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(&cols[1..9], &["det", "3", "0", "0", "0", "0", "0", "NA"]);
}

#[test]
fn opt_both_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    fs::write(&trace, "minla-trace v1\nmodel: cliques\nn: 3\npi0: 0 1 2\nevent: 0 2\nevent: 0 1\n").unwrap();
    for extra in [&[][..], &["--exhaustive"][..]] {
        let mut args = vec!["opt", "--trace", p(&trace)];
        args.extend_from_slice(extra);
        let o = minla(&args);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["cost"], 1);
        assert_eq!(v["witness"], "0 2 1");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "minla-trace v1\nmodel: rings\n").unwrap();
    let o = minla(&["opt", "--trace", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let big = dir.path().join("big.txt");
    minla(&["gen", "--kind", "random", "--model", "cliques", "--n", "9", "--seed", "1", "--out", p(&big)]);
    assert_eq!(minla(&["opt", "--trace", p(&big), "--exhaustive"]).status.code(), Some(3));

    assert_eq!(minla(&["verify", "--lemma", "harmonic", "--trials", "10", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(minla(&["gen", "--kind", "tree", "--model", "lines", "--n", "6", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(minla(&["simulate", "--algo", "greedy"]).status.code(), Some(2));
}

#[test]
fn verify_orientation_on_given_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    fs::write(&trace, "minla-trace v1\nmodel: lines\nn: 2\npi0: 1 0\nevent: 0 1\n").unwrap();
    let o = minla(&["verify", "--lemma", "orientation", "--trials", "1000", "--seed", "2", "--trace", p(&trace)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"][0]["hits"], 0);
}

#[test]
fn verify_identities_passes() {
    let o = minla(&["verify", "--lemma", "identities", "--trials", "1000", "--seed", "4"]);
    assert!(o.status.success());
}

#[test]
fn duel_dump_replays_to_the_same_cost() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("duel.txt");
    let o = minla(&["duel", "--algo", "det", "--adversary", "middle-line", "--n", "9", "--dump-trace", p(&dump)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let det_cost = v["det_cost"].as_u64().unwrap();
    let sim = minla(&["simulate", "--algo", "det", "--trace", p(&dump), "--seed", "0", "--trials", "1", "--format", "json"]);
    let s: serde_json::Value = serde_json::from_slice(&sim.stdout).unwrap();
    assert_eq!(s["records"][0]["cost_total"].as_u64().unwrap(), det_cost);
    assert_eq!(s["meta"]["opt"]["cost"], v["opt"]["cost"]);
    assert_eq!(minla(&["duel", "--algo", "rand", "--adversary", "middle-line", "--n", "9"]).status.code(), Some(2));
}

//! The `reorg` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn reorg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reorg")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = reorg(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn enumeration_prints_one_json_line() {
    let out = ok(&["estimate", "--alpha", "0.3", "--length", "2", "--method", "enum"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v = json(&out);
    assert_eq!(v["p_hat"], 0.08115642828);
    assert_eq!(v["method"], "enum");
    assert_eq!(v["params"], "24,8,40");
    // Without --out the manifest goes to standard error.
    let manifest: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(manifest["subcommand"], "estimate");
}

#[test]
fn importance_sampling_reports_its_proposal() {
    let out = ok(&[
        "estimate", "--alpha", "0.4", "--length", "20", "--method", "is", "--samples", "20000", "--seed", "2",
    ]);
    let v = json(&out);
    assert_eq!(v["alpha_q"], 0.45);
    assert!(v["lr_floor_violations"].is_u64());
    let out = ok(&[
        "estimate", "--alpha", "0.4", "--length", "20", "--method", "is", "--alpha-q", "0.42", "--samples", "1000",
    ]);
    assert_eq!(json(&out)["alpha_q"], 0.42);
}

#[test]
fn mean_cost_target() {
    let out = ok(&[
        "estimate", "--alpha", "0.45", "--length", "8", "--target", "mean-cost", "--samples", "20000", "--seed", "1",
    ]);
    let v = json(&out);
    assert_eq!(v["target"], "mean_cost");
    let m = v["mean_cost"].as_f64().unwrap();
    assert!(v["mean_cost_ci_low"].as_f64().unwrap() <= m && m <= v["mean_cost_ci_high"].as_f64().unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["estimate", "--alpha", "0.6", "--length", "2"][..],
        &["estimate", "--alpha", "0.3", "--length", "0"],
        &["estimate", "--alpha", "0.3", "--length", "2", "--params", "33,8,40"],
        &["estimate", "--alpha", "0.3", "--length", "2", "--method", "is", "--alpha-q", "0.2"],
        &["sweep", "--alpha", "0.45", "--beta", "1.2"],
        &["sweep", "--alpha", "0.45", "--beta", "0.5", "--grid", "ei=0:40:4"],
        &["simulate", "--alpha", "0.3", "--min-attack", "8", "--blocks", "100", "--max-attack", "40"],
        &["estimate", "--alpha", "0.3"],
        &["frobnicate"],
    ] {
        let out = reorg(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn budget_overflow_is_a_runtime_error() {
    let out = reorg(&["estimate", "--alpha", "0.3", "--length", "5", "--method", "enum"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn ideal_simulation_has_full_health() {
    let dir = tempfile::tempdir().unwrap();
    let chain = path(dir.path(), "c.jsonl");
    let health = path(dir.path(), "h.csv");
    ok(&["simulate", "--alpha", "0", "--blocks", "100", "--min-attack", "2", "--seed", "1", "--out", &chain]);
    ok(&["health", "--chain", &chain, "--window", "40", "--out", &health]);
    let text = std::fs::read_to_string(&health).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slot,health"));
    let values: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values.len(), 99);
    assert!(values.iter().all(|v| *v == "40.0"), "{values:?}");
    assert!(Path::new(&format!("{health}.manifest.json")).exists());
    assert!(Path::new(&format!("{chain}.manifest.json")).exists());
}

#[test]
fn simulation_writes_events_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let chain = path(dir.path(), "c.jsonl");
    let events = path(dir.path(), "e.jsonl");
    let trace = path(dir.path(), "t.csv");
    ok(&[
        "simulate", "--alpha", "0.375", "--min-attack", "8", "--blocks", "968", "--seed", "1", "--out", &chain,
        "--events", &events, "--trace", &trace,
    ]);
    let ev = std::fs::read_to_string(&events).unwrap();
    assert!(ev.lines().count() >= 1);
    for line in ev.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["executed_at"].is_u64() && v["fork_length"].as_u64().unwrap() >= 8);
    }
    let tr = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(tr.lines().next(), Some("slot,health,under_attack"));
    assert_eq!(tr.lines().count(), 968);
    assert_eq!(std::fs::read_to_string(&chain).unwrap().lines().count(), 968);
}

#[test]
fn malformed_chain_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("bad.jsonl");
    std::fs::write(&chain, "{\"slot\":0,\"priority\":0,\"endorsements\":32}\n{\"slot\":1}\n").unwrap();
    let out = reorg(&["health", "--chain", chain.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn sweep_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let grid = path(dir.path(), "g.csv");
    let cmp = path(dir.path(), "r.csv");
    ok(&[
        "sweep", "--alpha", "0.45", "--beta", "0.5", "--grid", "ei=16:24:8,de=4:8:4,dp=8:40:32", "--include",
        "15,5,8", "--samples", "5000", "--seed", "3", "--smooth", "1", "--out", &grid,
    ]);
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ei,de,dp,o1,o1_lo,o1_hi,o2,o2_lo,o2_hi,objective,smoothed"));
    assert_eq!(lines.clone().count(), 9);
    // The off-lattice design has no smoothed value.
    let extra = lines.find(|l| l.starts_with("15,5,8,")).unwrap();
    assert!(extra.ends_with(','));

    ok(&["compare", "--from", &grid, "--candidates", "24,8,40;15,5,8", "--beta-list", "0.1,0.5", "--out", &cmp]);
    let text = std::fs::read_to_string(&cmp).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "beta,candidate,ratio");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("0.1,\"24,8,40\","), "{}", rows[1]);

    let missing = reorg(&["compare", "--from", &grid, "--candidates", "1,1,1"]);
    assert_ne!(missing.status.code(), Some(0));
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["estimate", "--alpha", "0.4", "--length", "10", "--samples", "100000", "--seed", "5"],
        vec!["estimate", "--alpha", "0.38", "--length", "20", "--method", "is", "--samples", "50000", "--seed", "5"],
        vec!["sweep", "--alpha", "0.45", "--beta", "0.3", "--grid", "ei=8:24:8,de=4:8:4,dp=8", "--samples", "3000", "--seed", "5"],
        vec!["simulate", "--alpha", "0.375", "--min-attack", "8", "--blocks", "400", "--seed", "5"],
    ];
    for args in runs {
        let a = ok(&[&["--threads", "1"][..], &args].concat());
        let b = ok(&[&["--threads", "3"][..], &args].concat());
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let chain = path(dir.path(), "c.jsonl");
    ok(&["simulate", "--alpha", "0.375", "--min-attack", "8", "--blocks", "200", "--seed", "5", "--out", &chain]);
    let a = ok(&["--threads", "1", "health", "--chain", &chain]);
    let b = ok(&["--threads", "4", "health", "--chain", &chain]);
    assert_eq!(a.stdout, b.stdout);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clum() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_clum"));
    cmd.env_remove("CLUM_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    clum().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    // The report is the last JSON document; trace lines (if any) come first
    // and are single lines, so split at the first pretty-printed brace.
    let start = text.find("{\n").expect("pretty report present");
    serde_json::from_str(&text[start..]).expect("report parses")
}

fn write(path: &Path, contents: &str) {
    fs::write(path, contents).unwrap();
}

#[test]
fn solve_exact_empty_ledger_returns_subsidy() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("empty.json");
    write(&ledger, r#"{"C0": 7.0, "N": 8, "securities": []}"#);
    let rep = report(&run(&["solve-exact", "--ledger", ledger.to_str().unwrap()]));
    assert_eq!(rep["result"]["cost"], 7.0);
    assert_eq!(rep["command"], "solve-exact");
}

#[test]
fn count_models_trivial_clause() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("triv.cnf");
    write(&cnf, "p cnf 2 1\n1 2 0\n");
    for via in ["pricing", "brute"] {
        let rep = report(&run(&["count-models", "--dimacs", cnf.to_str().unwrap(), "--via", via]));
        assert_eq!(rep["result"]["count"], 3, "via {via}");
    }
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok - exact-golden-ratio"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Usage errors: unknown subcommand / unknown flag -> 1.
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["selftest", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // Domain errors -> 2.
    assert_eq!(
        run(&["solve-exact", "--ledger", "/definitely/not/here.json"]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.json");
    write(&bad, r#"{"C0": -3.0, "N": 4, "securities": []}"#);
    assert_eq!(run(&["solve-exact", "--ledger", bad.to_str().unwrap()]).status.code(), Some(2));

    // Capacity errors -> 3.
    let big = dir.path().join("big.cnf");
    write(&big, "p cnf 30 1\n1 2 0\n");
    assert_eq!(
        run(&["count-models", "--dimacs", big.to_str().unwrap(), "--via", "brute"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn reports_are_byte_identical_and_env_seed_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("m.json");
    write(
        &ledger,
        r#"{"C0": 1.0, "n_events": 6, "N": 64, "securities": [
            {"type":"clause2","lits":[[1,true],[4,false]],"qty":2},
            {"type":"indicator","outcome":9,"qty":1}]}"#,
    );
    let args =
        ["solve-approx", "--ledger", ledger.to_str().unwrap(), "--epsilon", "0.05", "--delta",
         "0.1", "--seed", "33", "--trace"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same inputs and seed must print identical bytes");

    let via_env = clum()
        .args(["solve-approx", "--ledger", ledger.to_str().unwrap(), "--epsilon", "0.05",
               "--delta", "0.1", "--trace"])
        .env("CLUM_SEED", "33")
        .output()
        .unwrap();
    assert_eq!(a.stdout, via_env.stdout, "CLUM_SEED must act exactly like --seed");

    // Trace lines are valid JSON and as many as the report's iteration count.
    let text = String::from_utf8(a.stdout).unwrap();
    let traces: Vec<Value> = text
        .lines()
        .take_while(|l| l.starts_with("{\"") )
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let start = text.find("{\n").unwrap();
    let rep: Value = serde_json::from_str(&text[start..]).unwrap();
    assert_eq!(traces.len() as u64, rep["diagnostics"]["iterations"].as_u64().unwrap());
    for row in &traces {
        assert!(row["a"].as_f64().unwrap() <= row["b"].as_f64().unwrap());
    }
}

#[test]
fn interval_workflow_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("iv.json");
    let s = state.to_str().unwrap();

    report(&run(&["interval", "init", "--state", s, "--n", "1000000000", "--c0", "2.0"]));
    report(&run(&["interval", "buy", "--state", s, "--lo", "10", "--hi", "500", "--qty", "3"]));
    let rep = report(&run(&["interval", "buy", "--state", s, "--lo", "400", "--hi", "900", "--qty", "2"]));
    assert_eq!(rep["result"]["q_max"], 5);
    assert_eq!(rep["result"]["s_qmax"], 101);

    let rep = report(&run(&["interval", "max", "--state", s]));
    assert_eq!(rep["result"]["q_max"], 5);

    let rep = report(&run(&[
        "interval", "quote", "--state", s, "--lo", "0", "--hi", "999999999", "--qty", "1",
        "--epsilon", "0.05", "--delta", "0.05", "--seed", "4",
    ]));
    // Uniform +1 shifts the cost curve by exactly 1; both estimates carry
    // the same epsilon so the difference stays near 1.
    let cost = rep["result"]["cost"].as_f64().unwrap();
    assert!(cost > 0.0 && cost < 3.0, "quote cost {cost}");

    // Quote must not have persisted its hypothetical purchase.
    let rep = report(&run(&["interval", "max", "--state", s]));
    assert_eq!(rep["result"]["q_max"], 5);

    // The file is the documented (key, value) list.
    let parsed: Value = serde_json::from_str(&fs::read_to_string(&state).unwrap()).unwrap();
    assert!(parsed["intervals"].is_array());
    assert_eq!(parsed["N"], 1_000_000_000u64);
}

#[test]
fn trade_commits_and_quote_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("m.json");
    write(&ledger, r#"{"C0": 2.0, "n_events": 4, "N": 16, "securities": []}"#);
    let l = ledger.to_str().unwrap();

    let quote1 = report(&run(&["quote", "--ledger", l, "--clause", "1 2", "--qty", "1"]));
    let quote2 = report(&run(&["quote", "--ledger", l, "--clause", "1 2", "--qty", "1"]));
    assert_eq!(quote1["result"]["cost"], quote2["result"]["cost"], "quote must not mutate");
    assert_eq!(quote1["diagnostics"]["path"], "exact");

    let trade1 = report(&run(&["trade", "--ledger", l, "--clause", "1 2", "--qty", "1"]));
    assert_eq!(trade1["result"]["cost"], quote1["result"]["cost"]);
    assert_eq!(trade1["result"]["committed"], true);

    // Convexity: the same purchase again is at least as expensive.
    let trade2 = report(&run(&["trade", "--ledger", l, "--clause", "1 2", "--qty", "1"]));
    let c1 = trade1["result"]["cost"].as_f64().unwrap();
    let c2 = trade2["result"]["cost"].as_f64().unwrap();
    assert!(c2 >= c1, "second unit cheaper: {c2} < {c1}");

    let persisted: Value = serde_json::from_str(&fs::read_to_string(&ledger).unwrap()).unwrap();
    assert_eq!(persisted["securities"].as_array().unwrap().len(), 2);
}

#[test]
fn wish_price_reports_and_warns_on_alpha_override() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("m.json");
    write(
        &ledger,
        r#"{"C0": 1.0, "n_events": 8, "N": 256, "securities": [
            {"type":"clause2","lits":[[2,true],[5,true]],"qty":1}]}"#,
    );
    let out = run(&[
        "wish-price", "--ledger", ledger.to_str().unwrap(), "--clause", "3 -7", "--delta",
        "0.1", "--seed", "11", "--alpha", "0.5",
    ]);
    let rep = report(&out);
    let price = rep["result"]["price"].as_f64().unwrap();
    assert!(price > 0.0 && price < 1.0, "price {price}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("weaker guarantee"), "stderr: {stderr}");

    // Default alpha stays silent; n = 8 keeps the full T tractable.
    let out = run(&[
        "wish-price", "--ledger", ledger.to_str().unwrap(), "--clause", "3 -7", "--delta",
        "0.1", "--seed", "11",
    ]);
    let rep = report(&out);
    let price = rep["result"]["price"].as_f64().unwrap();
    assert!(price > 0.0 && price < 1.0, "price {price}");
    assert!(rep["diagnostics"]["rounds"].as_u64().unwrap() > 5000);
    assert!(String::from_utf8(out.stderr).unwrap().is_empty());
}

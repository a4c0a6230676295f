use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn henkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henkin")).args(args).env_remove("HENKIN_ATOMS_BUDGET").output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn eval_reports_results() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.l2", "forall x. x = x;\nexists x. forall y. x = y;");
    let out = henkin(&["eval", "--structure", "sigma0", "--budget", "2", "--formula", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["results"][0]["value"], true);
    assert_eq!(v["results"][0]["budgetLimited"], false);
    assert_eq!(v["results"][1]["value"], false);
    assert_eq!(v["budget"], 2);
}

#[test]
fn budget_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.l2", "forall x. x = x");
    let out = Command::new(env!("CARGO_BIN_EXE_henkin"))
        .args(["eval", "--formula", s(&f)])
        .env("HENKIN_ATOMS_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["budget"], 1);
    assert_eq!(stdout_json(&henkin(&["eval", "--formula", s(&f)]))["budget"], 2);
}

#[test]
fn bindings_supply_free_variables() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.l2", "exists x. !(x = y) & A(x)");
    let out = henkin(&["eval", "--formula", s(&f), "--bind", "y=1:3", "--bind", "A=1:3,1:5"]);
    assert_eq!(stdout_json(&out)["results"][0]["value"], true);
    let unbound = henkin(&["eval", "--formula", s(&f)]);
    assert_eq!(unbound.status.code(), Some(2));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.l2", "forall x.\n  (x = ");
    let out = henkin(&["eval", "--formula", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:8"));
    assert_eq!(henkin(&["eval", "--formula", "/nonexistent/f.l2"]).status.code(), Some(2));
    assert_eq!(henkin(&["eval", "--structure", "ksigma0:0", "--formula", s(&bad)]).status.code(), Some(2));
    assert_eq!(henkin(&["refute-tr", "--k", "1"]).status.code(), Some(2));
    assert_eq!(henkin(&["eval"]).status.code(), Some(2));
}

#[test]
fn choice_witness_certificate() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.l2", "forall y. (D(y) <-> y = x)");
    let json = dir.path().join("cert.json");
    let out = henkin(&["choice-witness", "--structure", "ksigma0:2", "--H", s(&h), "--json", s(&json)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("consequent verified"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["P", "mu", "blocks", "sigma", "G"]);
    assert_eq!(v["mu"], serde_json::json!([[1, 0], [2, 0]]));
    assert_eq!(v["blocks"].as_array().unwrap().len(), 2);
}

#[test]
fn failed_antecedent_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.l2", "D(x) & !D(x)");
    assert_eq!(henkin(&["choice-witness", "--H", s(&h)]).status.code(), Some(1));
    let two = write(&dir, "two.l2", "D(x); D(x)");
    assert_eq!(henkin(&["choice-witness", "--H", s(&two)]).status.code(), Some(2));
}

#[test]
fn refuters_confirm() {
    let out = henkin(&["refute-tr", "--k", "2", "--support-bound", "2", "--list-limit", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["claim"], "not_TR1");
    assert_eq!(v["supportBound"], 2);
    assert_eq!(v["accepted"], 0);
    assert_eq!(v["candidates"], 790_592);
    assert_eq!(v["refutations"].as_array().unwrap().len(), 5);

    let out = henkin(&["refute-wo", "--support-bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["candidates"], 1060);
    assert_eq!(v["refutationsListed"], 1000);
}

#[test]
fn oracle_check_passes_on_bundled_sentences() {
    for (st, budget, trials) in [("finite:2", "2", "10"), ("finite:3", "2", "10"), ("sigma0", "1", "2"), ("ksigma0:2", "0", "1")] {
        let out = henkin(&["oracle-check", "--structure", st, "--budget", budget, "--trials", trials, "--seed", "5"]);
        assert_eq!(out.status.code(), Some(0), "{st}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out)["mismatches"], serde_json::json!([]));
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.l2", "D(x) & forall y. (D(y) -> y = x | A(y))");
    let f = write(&dir, "f.l2", "exists x. !(x = c); Exists A:1. A(c) & exists y. A(y) & !(y = c)");
    let runs: [&[&str]; 3] = [
        &["choice-witness", "--structure", "ksigma0:3", "--H", s(&h), "--bind", "A=1:3,2:5"],
        &["refute-tr", "--k", "2", "--support-bound", "1"],
        &["oracle-check", "--structure", "ksigma0:2", "--formula", s(&f), "--seed", "9", "--bind", "c=2:2"],
    ];
    for args in runs {
        let paths = ["a.json", "b.json"].map(|n| dir.path().join(n));
        for p in &paths {
            let mut full = args.to_vec();
            full.extend(["--json", s(p)]);
            assert_eq!(henkin(&full).status.code(), Some(0), "{args:?}");
        }
        assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap(), "{args:?}");
    }
}

use std::process::{Command, Output};

use serde_json::Value;

fn boxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxlab")).args(args).env_remove("BOXLAB_MAX_VERTICES").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn quotient_writes_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c8.txt");
    let out = boxlab(&["quotient", "--family", "cyclic", "--n", "8", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("boxlab-graph v1"));
    assert_eq!(lines.count(), 16);
    assert_eq!(json(&out)["order"], 8);
}

#[test]
fn quotient_orders() {
    let sol = boxlab(&["quotient", "--family", "sol", "--modulus", "25"]);
    assert_eq!(json(&sol)["order"], 62_500);
    let sl = boxlab(&["quotient", "--family", "sl", "--m", "2", "--modulus", "3"]);
    assert_eq!(json(&sl)["order"], 24);
}

#[test]
fn exit_codes() {
    assert_eq!(boxlab(&["quotient", "--family", "nope", "--n", "3"]).status.code(), Some(1));
    assert_eq!(boxlab(&["quotient", "--bogus-flag"]).status.code(), Some(1));
    let budget = Command::new(env!("CARGO_BIN_EXE_boxlab"))
        .args(["quotient", "--family", "sol", "--modulus", "25"])
        .env("BOXLAB_MAX_VERTICES", "1000")
        .output()
        .unwrap();
    assert_eq!(budget.status.code(), Some(2));
    assert!(!budget.stderr.is_empty());
    let finding = boxlab(&["isometry", "--n", "2", "--swap", "0,1"]);
    assert_eq!(finding.status.code(), Some(3));
}

#[test]
fn boxspace_verdicts() {
    for (schedule, kmax, alpha) in [("sol:5^k", "2", "1/3"), ("lamplighter", "2", "1/2")] {
        let out = boxlab(&["boxspace", "--schedule", schedule, "--kmax", kmax, "--alpha", alpha]);
        assert!(out.status.success(), "{schedule}");
        assert_eq!(json(&out)["dalpha"]["verdict"], true);
    }
    let out = boxlab(&["boxspace", "--schedule", "z:1", "--kmax", "6", "--alpha", "1", "--K", "1/3"]);
    let v = json(&out);
    assert_eq!(v["dalpha"]["verdict"], true);
    assert_eq!(v["dalpha"]["exact"], true);
    assert_eq!(v["config"]["command"]["schedule"], "z:1");
}

#[test]
fn boxspace_csv_columns() {
    let out = boxlab(&["boxspace", "--schedule", "z:1", "--kmax", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "k,family,params,order,diameter,girth,lambda1,cheeger_lower,cheeger_upper,diam_over_order_alpha"
    );
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn distinguish_verdicts() {
    let run = |a: &[&str]| {
        let mut args = vec!["distinguish"];
        args.extend_from_slice(a);
        args.extend_from_slice(&["--disp", "8", "--ratio", "2^16", "--horizon", "200"]);
        json(&boxlab(&args))["verdict"].as_str().unwrap().to_string()
    };
    assert!(run(&["--nks", "1", "--nks", "3/2"]).starts_with("distinguished"));
    assert!(run(&["--sl", "2,2", "--sl", "2,3"]).starts_with("distinguished"));
    assert_eq!(run(&["--nks", "2", "--nks", "2"]), "matched");
}

#[test]
fn count_fullbox_isometry() {
    let out = boxlab(&["count", "--group", "z2", "--max", "20", "--oracle"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["census"]["a"][5], 12);

    // The closed form disagrees with the oracle; that is a finding, not a crash.
    let out = boxlab(&["count", "--group", "z2d4", "--max", "64", "--oracle"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["checks"]["sqrt_bounds_hold"], true);

    let out = boxlab(&["fullbox", "--group", "zxz2", "--max", "200"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["max_A"].as_f64().unwrap() >= 1.0);
    assert_eq!(v["K_n_constant"], true);

    let out = boxlab(&["isometry", "--n", "4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["report"]["isomorphism"], true);
}

#[test]
fn count_csv() {
    let out = boxlab(&["count", "--group", "z", "--max", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,a_n,s_n,provenance");
    assert_eq!(text.lines().nth(3).unwrap(), "3,1,3,closed-form");
}

#[test]
fn dalpha_estimate_runs() {
    let out = boxlab(&["dalpha", "--schedule", "z:1", "--kmax", "6"]);
    assert!(out.status.success());
    let a = json(&out)["estimate"]["alpha_hat"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 0.1);
}

#[test]
fn verify_all_quick_is_deterministic() {
    let a = boxlab(&["verify-all", "--quick"]);
    let b = boxlab(&["verify-all", "--quick"]);
    let stderr = String::from_utf8_lossy(&a.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("criterion ")).count(), 11);
    assert_eq!(json(&a)["payload"], json(&b)["payload"]);
    assert_eq!(serde_json::to_string(&json(&a)["payload"]).unwrap(), serde_json::to_string(&json(&b)["payload"]).unwrap());
}

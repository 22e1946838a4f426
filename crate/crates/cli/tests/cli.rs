use std::process::{Command, Output};

use serde_json::Value;

fn ipir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipir"))
        .args(args)
        .env_remove("IPIR_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn run_round_trip_is_byte_stable() {
    let args = [
        "run", "--K", "7", "--M", "1", "--D", "2", "--q", "5", "--m", "1", "--seed", "42",
    ];
    let a = ipir(&args);
    assert_eq!(code(&a), 0);
    let v = json(&a);
    assert_eq!(v["rate"], "2/5");
    assert_eq!(v["planted_match"], true);
    assert_eq!(v["seed"], 42);
    assert_eq!(ipir(&args).stdout, a.stdout);

    let query = serde_json::to_string(&v["query"]).unwrap();
    let parsed = ipir_core::gpcip::Query::from_json(&query).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), v["query"]);
}

#[test]
fn run_with_given_sets() {
    let out = ipir(&[
        "run",
        "--K",
        "5",
        "--M",
        "1",
        "--D",
        "2",
        "--m",
        "3",
        "--seed",
        "3",
        "--demand-set",
        "1,4",
        "--side-info",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["demand"], serde_json::json!([1, 4]));
    assert_eq!(v["recovered"].as_array().unwrap().len(), 2);
    let clash = ipir(&[
        "run",
        "--K",
        "5",
        "--M",
        "1",
        "--D",
        "2",
        "--seed",
        "3",
        "--demand-set",
        "1,4",
        "--side-info",
        "4",
    ]);
    assert_eq!(code(&clash), 1);
}

#[test]
fn run_smallest_instance_has_unit_rate() {
    let out = ipir(&[
        "run", "--K", "3", "--M", "1", "--D", "2", "--q", "3", "--seed", "5",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["rate"], "1/1");
}

#[test]
fn parameter_errors_exit_one() {
    let out = ipir(&["run", "--K", "2", "--M", "1", "--D", "2"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("D+M must be ≤ K"));
    assert_eq!(code(&ipir(&["run", "--M", "1", "--D", "2"])), 1);
    assert_eq!(
        code(&ipir(&[
            "params", "--K", "7", "--M", "2", "--D", "2", "--q", "3"
        ])),
        1
    );
}

#[test]
fn params_report() {
    let out = ipir(&["params", "--K", "11", "--M", "1", "--D", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["params"]["rho"], 2);
    assert_eq!(v["weights"]["spread"], "1/280");
    assert_eq!(v["spread_probability"], "2/11");
    assert_eq!(v["achievable_rate"], "1/4");
}

#[test]
fn privacy_audits() {
    let out = ipir(&["audit-privacy", "--K", "4", "--M", "1", "--D", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["keys_checked"], 4);
    assert_eq!(v["violations"], serde_json::json!([]));

    let mutated = ipir(&[
        "audit-privacy",
        "--K",
        "7",
        "--M",
        "1",
        "--D",
        "2",
        "--mutation",
        "no-shuffle",
    ]);
    assert_eq!(code(&mutated), 2);
    let v = json(&mutated);
    assert!(v["violations"][0]["posterior"]
        .as_str()
        .unwrap()
        .contains('/'));
}

#[test]
fn long_residual_needs_corrected_weights() {
    let standard = ipir(&["audit-privacy", "--K", "7", "--M", "2", "--D", "2"]);
    assert_eq!(code(&standard), 2);
    assert_eq!(json(&standard)["worst_violation"], "4/63");
    let fixed = ipir(&[
        "audit-privacy",
        "--K",
        "7",
        "--M",
        "2",
        "--D",
        "2",
        "--weights",
        "count-corrected",
    ]);
    assert_eq!(code(&fixed), 0);
}

#[test]
fn budget_exceeded_exits_three() {
    let out = ipir(&["audit-privacy", "--K", "20", "--M", "1", "--D", "2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample mode"));
    let env = Command::new(env!("CARGO_BIN_EXE_ipir"))
        .args(["audit-privacy", "--K", "7", "--M", "1", "--D", "2"])
        .env("IPIR_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&env), 3);
    assert_eq!(
        code(&ipir(&[
            "conj2",
            "--K",
            "7",
            "--D",
            "2",
            "--mode",
            "exhaustive"
        ])),
        3
    );
}

#[test]
fn sample_mode_privacy() {
    let out = ipir(&[
        "audit-privacy",
        "--K",
        "20",
        "--M",
        "1",
        "--D",
        "2",
        "--mode",
        "sample",
        "--samples",
        "20000",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["pass"], true);
}

#[test]
fn support_and_decodability_audits() {
    let out = ipir(&["audit-support", "--K", "4", "--M", "1", "--D", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["bound"], 2);
    assert!(v["min_cover_seen"].as_u64().unwrap() >= 2);
    let out = ipir(&["audit-decodability", "--K", "6", "--M", "2", "--D", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn rate_table_rows() {
    let out = ipir(&[
        "rate-table",
        "--k-min",
        "3",
        "--k-max",
        "12",
        "--M",
        "1",
        "--D",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("K,M,D,achievable,measured,match\n"));
    assert!(text.contains("\n8,1,2,1/3,1/3,true\n"));
    assert!(text.contains("\n7,1,2,2/5,2/5,true\n"));
    assert_eq!(text.lines().count(), 11);
    assert!(!text.contains("false"));
    let out = ipir(&[
        "rate-table",
        "--k-min",
        "7",
        "--k-max",
        "7",
        "--M",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(json(&out)[0]["achievable"], "1/2");
}

#[test]
fn branch_balance_command() {
    let out = ipir(&["theta-balance", "--k-max", "12"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn d_graph_scans() {
    let out = ipir(&["conj2", "--K", "5", "--D", "2", "--mode", "exhaustive"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["graphs_scanned"], 1u64 << 20);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    let args = [
        "conj2", "--K", "6", "--D", "2", "--mode", "sample", "--count", "20000", "--seed", "7",
    ];
    let a = ipir(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, ipir(&args).stdout);
}

#[test]
fn goodrel_check_variants() {
    let dir = std::env::temp_dir().join(format!("ipir-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let rel = dir.join("rel.json");
    std::fs::write(
        &rel,
        r#"{"K":4,"M":1,"D":2,"f":[{"I":[],"J":[4]},{"I":[1],"J":[1,2,3,4]},{"I":[2],"J":[1,2,3,4]},{"I":[3],"J":[1,2,3,4]},{"I":[4],"J":[4]}]}"#,
    )
    .unwrap();
    let rel = rel.to_str().unwrap();

    let lit = ipir(&["goodrel-check", "--file", rel, "--variant", "literal"]);
    assert_eq!(code(&lit), 0);
    let v = json(&lit);
    assert_eq!(v["report"]["good"], false);
    assert_eq!(
        v["report"]["avoidance"]["witness"],
        serde_json::json!([[4]])
    );
    assert_eq!(v["cover_bound"], Value::Null);

    let exc = ipir(&["goodrel-check", "--file", rel, "--variant", "excluding-i"]);
    assert_eq!(code(&exc), 0);
    let v = json(&exc);
    assert_eq!(v["report"]["good"], true);
    assert_eq!(v["cover_bound"]["cover_size"], 1);
    assert_eq!(v["cover_bound"]["bound"], 1);

    let graph = dir.join("g.json");
    std::fs::write(&graph, r#"{"n":3,"edges":[[1,2],[2,3],[3,1]]}"#).unwrap();
    let out = ipir(&[
        "goodrel-check",
        "--graph",
        graph.to_str().unwrap(),
        "--D",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["min_cover"]["size"], 1);
    assert_eq!(
        code(&ipir(&[
            "goodrel-check",
            "--graph",
            graph.to_str().unwrap()
        ])),
        1
    );
    std::fs::write(&graph, r#"{"n":2,"edges":[[1,1]]}"#).unwrap();
    assert_eq!(
        code(&ipir(&[
            "goodrel-check",
            "--graph",
            graph.to_str().unwrap(),
            "--D",
            "2"
        ])),
        1
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

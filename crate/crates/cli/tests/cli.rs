use std::process::{Command, Output};

use serde_json::Value as Json;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairmarket"))
        .args(args)
        .env_remove("FAIRMARKET_ENUM_BOUND")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Json {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn temp_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fairmarket-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_certifies_advertised_guarantees() {
    let out = run(&["solve", "--algorithm", "ef1_sdef1", "--instance", "thm_4_1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let certs = v["certificates"].as_array().unwrap();
    let labels: Vec<String> = certs
        .iter()
        .map(|c| {
            format!(
                "{}:{}",
                c["criterion"].as_str().unwrap(),
                c["side"].as_str().unwrap()
            )
        })
        .collect();
    assert_eq!(labels, ["ef1:agents", "sdef1_blocks:market"]);
    assert!(certs.iter().all(|c| c["passed"] == true));
}

#[test]
fn solve_market_algorithm_reports_prices() {
    let out = run(&[
        "solve",
        "--algorithm",
        "eq1_fpo",
        "--instance",
        "prop_B_1",
        "--trace",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["prices"].as_array().unwrap().len(), 4);
    assert!(v["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn solve_empty_instance() {
    let path = temp_path("empty.json");
    std::fs::write(
        &path,
        r#"{"n": 2, "m": 0, "utilities": [[], []], "market": []}"#,
    )
    .unwrap();
    for alg in [
        "identical_ranking",
        "ef1_sdef1",
        "cut_choose",
        "mes",
        "eq1_fpo",
        "pairs",
    ] {
        let out = run(&[
            "solve",
            "--algorithm",
            alg,
            "--instance",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            code(&out),
            0,
            "{alg}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(
            json(&out)["allocation"]["bundles"],
            serde_json::json!([[], []])
        );
    }
}

#[test]
fn solve_rejects_zero_utility() {
    let path = temp_path("zero.json");
    std::fs::write(
        &path,
        r#"{"n": 2, "m": 2, "utilities": [[1, 0], [1, 1]], "market": [1, 1]}"#,
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--algorithm",
        "eq1_fpo",
        "--instance",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero"));
}

#[test]
fn check_passing_and_failing() {
    let ok = run(&[
        "check",
        "--instance",
        "thm_4_1",
        "--allocation",
        "g1,g3,g6|g2,g4,g5",
        "--criteria",
        "ef1:agents,sdef1:market",
    ]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["passed"], true);

    let bad = run(&[
        "check",
        "--instance",
        "thm_4_5",
        "--allocation",
        "g1,g2|g3,g4",
        "--criteria",
        "efx:market",
        "--alpha",
        "1",
    ]);
    assert_eq!(code(&bad), 1);
    let v = json(&bad);
    let report = &v["reports"][0];
    assert_eq!(report["alpha"], 1);
    assert!(!report["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn check_without_criteria_passes() {
    let out = run(&[
        "check",
        "--instance",
        "prop_B_1",
        "--allocation",
        "g1|g2,g3,g4",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["reports"], serde_json::json!([]));
}

#[test]
fn check_reports_invalid_allocation() {
    let out = run(&[
        "check",
        "--instance",
        "prop_B_1",
        "--allocation",
        "g1,g2|g2,g3,g4",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn check_accepts_json_allocation_file() {
    let path = temp_path("alloc.json");
    std::fs::write(&path, r#"{"bundles": [["g1"], ["g2", "g3", "g4"]]}"#).unwrap();
    let out = run(&[
        "check",
        "--instance",
        "prop_B_1",
        "--allocation",
        path.to_str().unwrap(),
        "--criteria",
        "ef1,fpo,ef1:market",
    ]);
    assert_eq!(code(&out), 1);
    let passed: Vec<bool> = json(&out)["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["passed"].as_bool().unwrap())
        .collect();
    assert_eq!(passed, [true, true, false]);
}

#[test]
fn verify_theorems() {
    for args in [
        vec!["verify", "--theorem", "thm_3_1"],
        vec!["verify", "--theorem", "thm_4_1"],
        vec![
            "verify",
            "--theorem",
            "thm_4_4",
            "--n",
            "2",
            "--alpha",
            "3/4",
        ],
        vec!["verify", "--theorem", "thm_4_5", "--alpha", "1/2"],
        vec!["verify", "--theorem", "prop_B_1"],
        vec!["verify", "--theorem", "thm_3_2", "--max-goods", "4"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(json(&out)["holds"], true, "{args:?}");
    }
}

#[test]
fn verify_reports_claims_that_do_not_hold() {
    let out = run(&[
        "verify",
        "--theorem",
        "thm_4_4",
        "--n",
        "2",
        "--alpha",
        "1/2",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["holds"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "--theorem", "thm_9_9"])), 2);
    assert_eq!(
        code(&run(&[
            "solve",
            "--algorithm",
            "magic",
            "--instance",
            "thm_4_1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "check",
            "--instance",
            "thm_4_1",
            "--allocation",
            "g1|g2",
            "--criteria",
            "envy"
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn bound_exceeded_exits_three() {
    let out = run(&["--enum-bound", "10", "verify", "--theorem", "thm_3_1"]);
    assert_eq!(code(&out), 3);
    let out = Command::new(env!("CARGO_BIN_EXE_fairmarket"))
        .args(["verify", "--theorem", "thm_4_1"])
        .env("FAIRMARKET_ENUM_BOUND", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn generation_is_deterministic() {
    let args = [
        "gen", "--n", "3", "--m", "9", "--dist", "uniform", "--max", "10", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["n"], 3);
    assert_eq!(v["m"], 9);

    let empty = json(&run(&["gen", "--n", "2", "--m", "0", "--seed", "1"]));
    assert_eq!(empty["m"], 0);
}

#[test]
fn generated_identical_rankings_solve() {
    let path = temp_path("ident.json");
    let out = run(&[
        "gen",
        "--n",
        "3",
        "--m",
        "8",
        "--dist",
        "identical-ranking",
        "--seed",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "solve",
        "--algorithm",
        "identical_ranking",
        "--instance",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn bench_counts_certified_runs() {
    let out = run(&[
        "bench",
        "--algorithm",
        "pairs",
        "--n",
        "2",
        "--m",
        "7",
        "--count",
        "20",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["certified"], 20);
}

#[test]
fn search_and_cake() {
    let out = run(&["search", "--problem", "op_3_4", "--max-goods", "3"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out).get("counterexample").is_none());

    let out = run(&["cake", "--instance", "thm_5_1", "--n", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["cuts"], 4);

    let out = run(&["cake", "--instance", "thm_5_5"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["values"][1][1], "1/3");
    assert_eq!(v["values"][1][0], "4/9");
}

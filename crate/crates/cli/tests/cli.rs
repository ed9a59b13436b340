//! End-to-end tests of the `itercode` binary: golden help output, verb
//! behavior, exit codes, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_itercode"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn help_output_matches_golden_files() {
    let cases = [
        (vec!["--help"], "help_main.txt"),
        (vec!["catalog", "--help"], "help_catalog.txt"),
        (vec!["catalog", "show", "--help"], "help_catalog_show.txt"),
        (vec!["analyze", "--help"], "help_analyze.txt"),
        (vec!["diversity", "--help"], "help_diversity.txt"),
        (vec!["check-theta", "--help"], "help_check_theta.txt"),
        (
            vec!["check-theta", "quaternion", "--help"],
            "help_check_theta_quaternion.txt",
        ),
        (
            vec!["check-theta", "degree3", "--help"],
            "help_check_theta_degree3.txt",
        ),
        (vec!["decode-bench", "--help"], "help_decode_bench.txt"),
        (vec!["simulate", "--help"], "help_simulate.txt"),
    ];
    for (args, golden) in cases {
        let got = stdout(&args);
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(golden);
        let want = std::fs::read_to_string(&path).unwrap();
        assert_eq!(got, want, "help text drifted for {args:?}");
    }
}

#[test]
fn catalog_list_names_every_code() {
    let text = stdout(&["catalog", "list"]);
    for name in [
        "alamouti",
        "jafarkhani",
        "golden",
        "silver",
        "iter_silver",
        "iter_golden",
        "iter_alamouti",
        "deg3_ex1",
        "deg3_ex2",
        "iter_deg3_ex1",
        "iter_deg3_ex2",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn catalog_show_iter_silver_json_has_kappa_16() {
    let text = stdout(&["catalog", "show", "iter_silver", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["kappa"], 16);
    assert_eq!(v["side"], 4);
    assert_eq!(v["name"], "iter_silver");
    // exact entries ride along as p/q coefficient vectors
    assert!(v["basis"][0][0][0].is_array());
}

#[test]
fn analyze_with_paper_hint_reports_exponent_10() {
    let text = stdout(&["analyze", "iter_silver", "--theta", "-1", "--hint", "paper"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["grouping"]["hint_verified"], true);
    assert_eq!(v["grouping"]["result"]["exponent"], 10);
    assert_eq!(v["m13_exponent"], 13);
    assert_eq!(v["config"]["theta"], "-1");
}

#[test]
fn analyze_accepts_hint_files() {
    let dir = std::env::temp_dir().join("itercode-hint-test");
    std::fs::create_dir_all(&dir).unwrap();
    let hint = dir.join("silver_partition.json");
    std::fs::write(
        &hint,
        r#"{"groups": [[1,11],[3,9],[4,10],[2,12]], "conditioned": [5,6,7,8,13,14,15,16]}"#,
    )
    .unwrap();
    let text = stdout(&[
        "analyze",
        "iter_silver",
        "--theta",
        "-1",
        "--hint",
        hint.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["grouping"]["result"]["exponent"], 10);
}

#[test]
fn diversity_counterexample_sets_exit_code_1() {
    let out = run(&[
        "diversity",
        "jafarkhani",
        "--alphabet",
        "-1,0,1",
        "--mode",
        "exhaustive",
        "--expect",
        "diverse",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(v["count_zero"].as_u64().unwrap() > 0);
}

#[test]
fn diversity_clean_scan_exits_zero() {
    let out = run(&[
        "diversity",
        "alamouti",
        "--alphabet",
        "-2,0,2",
        "--mode",
        "exhaustive",
        "--expect",
        "diverse",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_theta_verbs_and_exit_codes() {
    let text = stdout(&[
        "check-theta",
        "quaternion",
        "--field",
        "Q(i)",
        "--a",
        "3",
        "--gamma",
        "1+i",
        "--theta",
        "1-i",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["report"]["verdict"], "division_certified");

    let out = run(&[
        "check-theta",
        "quaternion",
        "--field",
        "Q",
        "--a",
        "-1",
        "--gamma",
        "-1",
        "--theta",
        "-1",
        "--expect",
        "diverse",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let text = stdout(&["check-theta", "degree3", "--theta", "sqrtm7"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passes"], true);
    let out = run(&["check-theta", "degree3", "--theta", "-1", "--expect", "diverse"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decode_bench_emits_csv_with_config_header() {
    let text = stdout(&[
        "decode-bench",
        "iter_silver",
        "--theta",
        "-1",
        "--snr",
        "12",
        "--trials",
        "3",
        "--seed",
        "9",
        "--order",
        "grouping",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.contains(&"# seed=9"));
    let header_at = lines
        .iter()
        .position(|l| *l == "trial,snr,nodes,correct")
        .unwrap();
    assert_eq!(lines.len() - header_at - 1, 3, "one row per trial");
    for row in &lines[header_at + 1..] {
        assert_eq!(row.split(',').count(), 4);
    }
}

#[test]
fn simulate_is_worker_invariant_and_checks_config() {
    let dir = std::env::temp_dir().join("itercode-sim-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("sim.json");
    std::fs::write(
        &cfg,
        r#"{"code": {"name": "alamouti"}, "snr_db_grid": [8.0], "trials_per_point": 100,
            "alphabet": [-1, 1], "seed": 3}"#,
    )
    .unwrap();
    let one = stdout(&["simulate", "--config", cfg.to_str().unwrap(), "--workers", "1"]);
    let eight = stdout(&["simulate", "--config", cfg.to_str().unwrap(), "--workers", "8"]);
    assert_eq!(one, eight, "CSV must be byte-identical across worker counts");
    assert!(one.starts_with("# code=alamouti"));
    assert!(one.contains("snr_db,trials,block_errors,bler,mean_nodes,ci95"));

    let missing = run(&["simulate", "--config", "/nonexistent/missing.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["analyze", "nonsense_code"]);
    assert_eq!(out.status.code(), Some(2));
}

//! End-to-end checks of the binary: subcommands, flags, formats, exit
//! codes, and byte-deterministic output.

use std::process::{Command, Output};

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infogeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn metric_structured_output_is_valid_json() {
    let out = run_cli(&[
        "metric",
        "--model",
        "normal-1",
        "--points",
        "2",
        "--seed",
        "7",
        "--format",
        "structured",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["tasks"][0]["task"], "metric");
    let fisher = &v["tasks"][0]["metric"]["per_point"][0]["fisher"];
    assert!(fisher.is_array());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "checks",
        "--model",
        "normal-2",
        "--points",
        "5",
        "--seed",
        "11",
        "--format",
        "structured",
    ];
    let a = run_cli(&args);
    let b = run_cli(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = run_cli(&[
        "checks",
        "--model",
        "normal-2",
        "--points",
        "5",
        "--seed",
        "12",
        "--format",
        "structured",
    ]);
    assert_ne!(
        a.stdout, c.stdout,
        "a different seed must change the report"
    );
}

#[test]
fn classify_normal1_reports_so2() {
    let out = run_cli(&[
        "classify", "--model", "normal-1", "--points", "5", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict: SO(2)"), "{text}");
}

#[test]
fn classify_flat_toy_is_not_an_error() {
    // "not classified" is a legitimate outcome, not a failure
    let out = run_cli(&[
        "classify", "--model", "flat-toy", "--points", "5", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not classified"), "{text}");
}

#[test]
fn unknown_model_exits_with_config_error() {
    let out = run_cli(&["metric", "--model", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown model"), "{err}");
}

#[test]
fn failing_task_exits_nonzero() {
    // a saddle potential has an indefinite Hessian: the metric task errors
    let dir = std::env::temp_dir().join("infogeo-cli-test-saddle");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        tasks = ["metric"]
        [model]
        name = "saddle"
        dimension = 2
        potential = "t1*t1 - t2*t2"
        "#,
    )
    .unwrap();
    let out = run_cli(&["metric", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn config_file_with_explicit_points_and_out_file() {
    let dir = std::env::temp_dir().join("infogeo-cli-test-out");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        model = "normal-1"
        seed = 9
        tasks = ["metric"]
        [points]
        meancov = [{ mu = [0.0], sigma = [[1.0]] }]
        "#,
    )
    .unwrap();
    let report_path = dir.join("report.json");
    let out = run_cli(&[
        "metric",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "structured",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let fisher = &v["tasks"][0]["metric"]["per_point"][0]["fisher"];
    // the standard point gives exactly [[1,0],[0,2]]
    assert_eq!(fisher[0][0], 1.0);
    assert_eq!(fisher[1][1], 2.0);
}

#[test]
fn verify_paper_passes_and_prints_ledger() {
    let out = run_cli(&["verify-paper", "--seed", "42"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("discrepancy ledger: 25/25"), "{text}");
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn subcommand_flag_overrides_config_model() {
    let dir = std::env::temp_dir().join("infogeo-cli-test-override");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "model = \"normal-2\"\nseed = 4\n").unwrap();
    let out = run_cli(&[
        "metric",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        "flat-toy",
        "--points",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("model: flat-toy"), "{text}");
}

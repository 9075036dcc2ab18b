//! End-to-end tests of the command-line interface: flag handling, exit
//! codes, output formats, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnl-risk-bandit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

#[test]
fn help_lists_every_subcommand_and_exits_zero() {
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout_of(&output);
    for subcommand in ["simulate", "gen-instance", "eval-risk", "best-assortment", "verify"] {
        assert!(text.contains(subcommand), "help is missing {subcommand}");
    }
    for subcommand in ["simulate", "gen-instance", "eval-risk", "best-assortment", "verify"] {
        let output = run(&[subcommand, "--help"]);
        assert_eq!(output.status.code(), Some(0), "{subcommand} --help failed");
    }
}

#[test]
fn usage_errors_exit_two() {
    // Unknown flag.
    let output = run(&["eval-risk", "--criterion", "mean", "--bogus-flag", "1"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());
    // Missing required flag.
    let output = run(&["eval-risk", "--criterion", "mean"]);
    assert_eq!(output.status.code(), Some(2));
    // Unknown subcommand.
    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn eval_risk_prints_the_criterion_value() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("dist.json");
    write(&dist, "[[0.0, 0.5], [1.0, 0.5]]");

    let output = run(&["eval-risk", "--criterion", "mean", "--dist", dist.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "stderr: {:?}", output.stderr);
    assert_eq!(stdout_of(&output).trim(), "0.5");

    let output = run(&["eval-risk", "--criterion", "cvar:0.5", "--dist", dist.to_str().unwrap()]);
    assert_eq!(stdout_of(&output).trim(), "0");

    // Validation failures exit 1 with a diagnostic on stderr.
    let output = run(&["eval-risk", "--criterion", "cvar:7", "--dist", dist.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("error"));

    let bad = dir.path().join("bad.json");
    write(&bad, "[[0.0, 0.5], [1.0, 0.4]]");
    let output = run(&["eval-risk", "--criterion", "mean", "--dist", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn best_assortment_prints_ids_then_value() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("instance.json");
    write(
        &instance,
        r#"{"n": 2, "k": 1, "v": [0.9, 0.1], "r": [0.2, 1.0]}"#,
    );
    for extra in [&[][..], &["--local"][..]] {
        let mut args = vec![
            "best-assortment",
            "--instance",
            instance.to_str().unwrap(),
            "--criterion",
            "mean",
        ];
        args.extend_from_slice(extra);
        let output = run(&args);
        assert_eq!(output.status.code(), Some(0), "stderr: {:?}", output.stderr);
        let text = stdout_of(&output);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "{1}");
        let value: f64 = lines.next().unwrap().parse().unwrap();
        assert!((value - 0.18 / 1.9).abs() < 1e-12);
    }
}

#[test]
fn gen_instance_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let output = run(&[
            "gen-instance",
            "--n",
            "6",
            "--k",
            "3",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let instance = mnl_risk_bandit::Instance::load(&a).unwrap();
    assert_eq!(instance.n_products(), 6);
    assert_eq!(instance.cardinality_limit(), 3);
}

#[test]
fn simulate_writes_reproducible_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(
        &config,
        r#"{
  "n_products": 4,
  "cardinality_limit": 2,
  "horizon": 500,
  "repetitions": 2,
  "instance_count": 2,
  "master_seed": 7,
  "criterion": "cvar:0.5",
  "algorithms": ["risk-ucb", "ts"],
  "optimizer_mode": "exact",
  "rolling_window": 100
}"#,
    );
    let out_a = dir.path().join("out_a");
    let out_b = dir.path().join("out_b");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "2",
        ]);
        assert_eq!(output.status.code(), Some(0), "stderr: {:?}", output.stderr);
        let listed = stdout_of(&output);
        assert!(listed.contains("results.csv"));
        assert!(listed.contains("rolling.csv"));
    }

    for name in ["results.csv", "rolling.csv", "instance_000.json", "instance_001.json"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let results = std::fs::read_to_string(out_a.join("results.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algo,instance,checkpoint_t,mean_regret,worst_regret"
    );
    // 2 algorithms x 2 instances x 500 checkpoints.
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 500);
    let rolling = std::fs::read_to_string(out_a.join("rolling.csv")).unwrap();
    assert_eq!(rolling.lines().next().unwrap(), "algo,window_index,value");
    assert_eq!(rolling.lines().count(), 1 + 2 * 5);

    // A config that fails validation exits 1.
    let bad_config = dir.path().join("bad.json");
    write(
        &bad_config,
        r#"{
  "n_products": 4,
  "cardinality_limit": 9,
  "horizon": 500,
  "repetitions": 2,
  "instance_count": 2,
  "master_seed": 7,
  "criterion": "cvar:0.5",
  "algorithms": ["risk-ucb"],
  "optimizer_mode": "exact"
}"#,
    );
    let output = run(&[
        "simulate",
        "--config",
        bad_config.to_str().unwrap(),
        "--out",
        dir.path().join("out_c").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn verify_reports_suite_outcomes() {
    let output = run(&["verify", "--suite", "cvar-dual"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {:?}", output.stderr);
    assert!(stdout_of(&output).contains("PASS"));

    let output = run(&["verify", "--suite", "monotone-max", "--seed", "5"]);
    assert_eq!(output.status.code(), Some(0));

    let output = run(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(output.status.code(), Some(1));
}

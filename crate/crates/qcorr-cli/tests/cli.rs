//! Black-box tests of the installed binary: argument handling, exit codes,
//! output determinism, and the documented precedence rules for tolerances
//! and seeds.

use std::path::PathBuf;
use std::process::{Command, Output};

use qcorr::states::{bell, BellState};

fn qcorr(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcorr"));
    // Isolate from the caller's environment; individual tests opt back in.
    cmd.env_remove("QCORR_SEED");
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    qcorr(args).output().expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qcorr-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn analyze_werner_json_is_complete_and_deterministic() {
    let args = ["analyze", "--family", "werner", "--w", "0.5"];
    let out = run(&args);
    let report = stdout_json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["state"]["label"], "werner");
    assert!((report["spectrum"][0].as_f64().unwrap() - 0.625).abs() < 1e-12);
    assert_eq!(report["criteria"]["ppt"]["holds"], false, "w=0.5 is entangled");
    assert_eq!(report["criteria"]["nonlocal"]["holds"], false, "w=0.5 is local");
    assert_eq!(report["absolute"]["locality"]["holds"], true);
    assert_eq!(report["hierarchy_violations"].as_array().unwrap().len(), 0);
    assert!(report.get("seed").is_none(), "deterministic family carries no seed");

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout, "same invocation must be byte-identical");
}

#[test]
fn analyze_classical_gisin_is_discord_free_on_both_sides() {
    let out = run(&["analyze", "--family", "gisin", "--lambda", "0", "--theta", "1.0"]);
    let report = stdout_json(&out);
    assert_eq!(report["criteria"]["zero_discord_blocks_a"]["holds"], true);
    assert_eq!(report["criteria"]["zero_discord_blocks_b"]["holds"], true);
    assert!(report["criteria"]["discord_b_given_a"].as_f64().unwrap() < 1e-6);
    assert!(report["criteria"]["discord_a_given_b"].as_f64().unwrap() < 1e-6);
}

#[test]
fn analyze_reads_a_state_file_and_fingerprints_it() {
    let path = temp_file("bell.json", &bell(BellState::PhiPlus).to_json());
    let out = run(&["analyze", "--file", path.to_str().unwrap()]);
    let report = stdout_json(&out);
    assert_eq!(report["state"]["label"], "file");
    let hash = report["state"]["params"]["content_fnv1a64"].as_str().unwrap();
    assert_eq!(hash.len(), 16, "fnv1a64 hex digest: {hash}");
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    let discord = report["criteria"]["discord_b_given_a"].as_f64().unwrap();
    assert!((discord - 1.0).abs() < 1e-3, "bell discord {discord}");
    std::fs::remove_file(path).ok();
}

#[test]
fn unreadable_or_malformed_state_files_exit_with_usage_code() {
    let out = run(&["analyze", "--file", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let path = temp_file("garbage.json", "not a state");
    let out = run(&["analyze", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    std::fs::remove_file(path).ok();
}

#[test]
fn missing_family_parameters_exit_with_usage_code() {
    let out = run(&["analyze", "--family", "werner"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--w"));

    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));

    // Out-of-range family parameter is invalid input, not an internal error.
    let out = run(&["analyze", "--family", "werner", "--w", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_produces_deterministic_lf_terminated_csv() {
    let args = [
        "sweep", "--family", "werner", "--properties", "ppt,chsh", "--steps", "11",
    ];
    let out = run(&args);
    assert!(out.status.success());
    assert!(!out.stdout.contains(&b'\r'), "line endings must be bare LF");
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "w,ppt,chsh");
    assert_eq!(lines.len(), 12, "header plus 11 grid rows");
    let last: Vec<f64> = lines[11].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(last.len(), 3);
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[2] - 2.0 * 2.0_f64.sqrt()).abs() < 1e-9, "chsh at w=1");

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sweep_without_properties_prints_only_the_header() {
    let out = run(&["sweep", "--family", "werner"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "w\n");

    let out = run(&["sweep", "--family", "gisin"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "lambda,theta\n");
}

#[test]
fn sweep_help_lists_the_property_columns() {
    let out = run(&["sweep", "--family", "werner", "--properties", "help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["steering3:", "abs-nnce:", "discord-ba:", "purity:"] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }

    let out = run(&["sweep", "--family", "werner", "--properties", "no-such-column"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown property"));
}

#[test]
fn tables_reproduce_the_catalog_thresholds() {
    let out = run(&["tables"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let expect = [
        ("werner", "separability", "0.333333"),
        ("werner", "unsteerability-3", "0.577350"),
        ("werner", "locality", "0.707107"),
        ("werner", "nonneg-cond-entropy", "0.747614"),
        ("werner", "abs-separability", "0.333333"),
        ("werner", "abs-unsteerability-3", "0.577350"),
        ("werner", "abs-locality", "0.707107"),
        ("werner", "abs-nonneg-cond-entropy", "0.747614"),
        ("gisin(theta=pi/4)", "separability", "0.500000"),
        ("gisin(theta=pi/4)", "unsteerability-3", "0.666667"),
        ("gisin(theta=pi/4)", "locality", "0.707107"),
        ("gisin(theta=pi/4)", "abs-unsteerability-3", "0.666667"),
        ("gisin(theta=pi/4)", "abs-locality", "0.707107"),
        ("gisin(theta=pi/4)", "abs-nonneg-cond-entropy", "0.772908"),
    ];
    for (family, property, boundary) in expect {
        let found = text.lines().any(|line| {
            let mut fields = line.split_whitespace();
            fields.next() == Some(family)
                && fields.next() == Some(property)
                && fields.next() == Some(boundary)
        });
        assert!(found, "no row {family} {property} {boundary} in:\n{text}");
    }
}

#[test]
fn search_finds_a_counterexample_above_the_boundary() {
    let out = run(&[
        "search", "--family", "werner", "--w", "0.6", "--property", "separability",
        "--budget", "500",
    ]);
    let result = stdout_json(&out);
    assert_eq!(result["broken"], true);
    assert!(result["margin"].as_f64().unwrap() < -1e-6);
    assert_eq!(result["unitary"].as_array().unwrap().len(), 4);
    assert!(result["candidates_tried"].as_u64().unwrap() <= 500);
}

#[test]
fn search_budget_exhaustion_exits_three() {
    let out = run(&[
        "search", "--family", "werner", "--w", "0.2", "--property", "separability",
        "--budget", "300",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(result["broken"], false);
    assert_eq!(result["budget"], 300);
    assert!(result["best_margin"].as_f64().unwrap() > 0.0, "w=0.2 is absolutely separable");
}

#[test]
fn tolerances_resolve_config_file_then_flags() {
    let config = temp_file("tols.cfg", "# comment\neq_tol = 1e-6\n");
    let cfg = config.to_str().unwrap();
    let base = ["analyze", "--family", "werner", "--w", "0.5", "--config", cfg];
    let report = stdout_json(&run(&base));
    assert_eq!(report["tolerances"]["eq_tol"].as_f64().unwrap(), 1e-6);
    assert_eq!(report["tolerances"]["psd_tol"].as_f64().unwrap(), 1e-9);

    let mut with_flag = base.to_vec();
    with_flag.extend(["--eq-tol", "1e-5"]);
    let report = stdout_json(&run(&with_flag));
    assert_eq!(
        report["tolerances"]["eq_tol"].as_f64().unwrap(),
        1e-5,
        "flag must override the config file"
    );

    let bad = temp_file("bad.cfg", "no_such_tol = 1\n");
    let out = run(&[
        "analyze", "--family", "werner", "--w", "0.5", "--config", bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(config).ok();
    std::fs::remove_file(bad).ok();
}

#[test]
fn seed_resolution_prefers_flag_over_environment() {
    let base = ["analyze", "--family", "random", "--rank", "2"];
    let mut with_flag = base.to_vec();
    with_flag.extend(["--seed", "1"]);
    let flag_out = run(&with_flag);
    let report = stdout_json(&flag_out);
    assert_eq!(report["seed"], 1, "random family must record its seed");
    assert_eq!(report["state"]["params"]["seed"], 1);

    let env_out = qcorr(&base).env("QCORR_SEED", "1").output().unwrap();
    assert_eq!(flag_out.stdout, env_out.stdout, "--seed 1 and QCORR_SEED=1 agree");

    let other_env = qcorr(&base).env("QCORR_SEED", "2").output().unwrap();
    assert_ne!(flag_out.stdout, other_env.stdout, "different seed, different state");

    let both = qcorr(&with_flag).env("QCORR_SEED", "2").output().unwrap();
    assert_eq!(flag_out.stdout, both.stdout, "the flag wins over the environment");
}

//! The command-line binary: exit codes, artifacts, determinism, environment override.

use std::path::Path;
use std::process::Command;

fn illposed(out: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_illposed"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("ILLPOSED_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn figure_two_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = illposed(dir.path(), &["figures", "--id", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "illposed/1");
    let ratio = v["computed_ratio"].as_f64().unwrap();
    assert!((1e-8 / 30.0..=30e-8).contains(&ratio));
}

#[test]
fn spectrum_csv_is_positive_and_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = illposed(dir.path(), &["spectrum", "--op", "laplace:a=1,b=2", "--n", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mu: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(mu.len() >= 12);
    assert!(mu.windows(2).all(|w| w[0] > w[1]) && *mu.last().unwrap() > 0.0);
}

#[test]
fn fourier_match_meets_the_residual_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = illposed(dir.path(), &["match", "--op", "fourier", "--N", "128", "--m", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("match_fourier.json"));
    assert!(v["max_relative_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["report"]["modes"].as_array().unwrap().len(), 10);
}

#[test]
fn half_line_match_picks_a_fourth_order_variant() {
    let dir = tempfile::tempdir().unwrap();
    let out = illposed(dir.path(), &["match", "--op", "laplace-adjoint", "--N", "16", "--m", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["chosen"].as_str().unwrap().starts_with("fourth:"));
    assert_eq!(v["candidates"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_and_caps_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(illposed(dir.path(), &["spectrum", "--op", "gauss"]).status.code(), Some(1));
    assert_eq!(illposed(dir.path(), &["match", "--op", "fourier", "--N", "1024"]).status.code(), Some(1));
    assert_eq!(illposed(dir.path(), &["spectrum", "--bogus"]).status.code(), Some(1));
    assert_eq!(illposed(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(illposed(dir.path(), &["figures", "--id", "3"]).status.code(), Some(2));
}

#[test]
fn verify_outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "--op", "laplace", "--count", "50"];
    assert_eq!(illposed(a.path(), &args).status.code(), Some(0));
    assert_eq!(illposed(b.path(), &args).status.code(), Some(0));
    for name in ["verify_laplace_a_1_b_2.json", "verify_laplace_a_1_b_2.csv"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let other = tempfile::tempdir().unwrap();
    illposed(other.path(), &["--seed", "1", "verify", "--op", "laplace", "--count", "50"]);
    assert_ne!(
        std::fs::read(a.path().join("verify_laplace_a_1_b_2.csv")).unwrap(),
        std::fs::read(other.path().join("verify_laplace_a_1_b_2.csv")).unwrap()
    );
}

#[test]
fn environment_overrides_out_dir() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_illposed"))
        .args(["--out-dir", flag.path().to_str().unwrap(), "figures", "--id", "2"])
        .env("ILLPOSED_OUT_DIR", env.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env.path().join("figure_2.json").exists());
    assert!(!flag.path().join("figure_2.json").exists());
}

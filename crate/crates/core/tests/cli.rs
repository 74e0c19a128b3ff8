use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use xorsat_lab::instance::Instance;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xorsat-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("XORSAT_LAB_WORKERS")
        .output()
        .expect("spawn xorsat-lab")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn threshold_reports_c_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["threshold", "--k", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let cs = v["c_star"].as_f64().unwrap();
    assert!((cs - 0.917935).abs() < 1e-6, "{cs}");
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("threshold: "));
}

#[test]
fn gen_is_deterministic_and_solve_agrees_on_hash() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json", "c.xsat"] {
        let out = bin(
            &["gen", "--model", "constrained", "--k", "4", "--n", "60", "--m", "55", "--seed", "9", "--out", name],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(dir.path().join("a.json")).unwrap(), std::fs::read(dir.path().join("b.json")).unwrap());
    let json = Instance::load(&dir.path().join("a.json")).unwrap();
    let binary = Instance::load(&dir.path().join("c.xsat")).unwrap();
    assert_eq!(json.content_hash(), binary.content_hash());

    let out = bin(&["solve", "c.xsat", "--out", "x.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["content_hash"].as_str().unwrap(), json.content_hash());
    if v["consistent"].as_bool().unwrap() {
        let bits: Vec<bool> = std::fs::read_to_string(dir.path().join("x.txt"))
            .unwrap()
            .trim()
            .chars()
            .map(|c| c == '1')
            .collect();
        assert!(json.is_satisfied_by(&bits).unwrap());
    }
}

#[test]
fn peel_reports_core_size() {
    let dir = tempfile::tempdir().unwrap();
    bin(&["gen", "--k", "3", "--n", "500", "--c", "0.95", "--out", "i.json"], dir.path());
    let out = bin(&["peel", "i.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("core"), "{text}");
}

#[test]
fn certify_verified_exits_zero_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["certify", "--claim", "amed-induction", "--out", "cert.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verified"], Value::Bool(true));
    let out = bin(&["certify", "--replay", "cert.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn certify_unreachable_target_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(
        &["certify", "--claim", "sk-cells", "--k", "5", "--split", "0.1840,0.2743", "--target", "-1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["certify", "--claim", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["gen", "--k", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["threshold", "--k", "1"], dir.path()).status.code(), Some(1));
    let out = bin(&["gen", "--model", "constrained", "--k", "3", "--n", "10", "--m", "5", "--out", "x.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn experiment_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"kind":"sat_sweep","model":"unconstrained","k":3,"n":100,"c_grid":[0.8],"trials":5,"seed":3}"#,
    )
    .unwrap();
    let out = bin(&["experiment", "--config", "cfg.json", "--trials", "7", "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["config"]["trials"], 7);
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let trials = std::fs::read_to_string(dir.path().join("run.trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 8);
    assert!(dir.path().join("run.json").exists());
}

#[test]
fn experiment_unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"kind":"sat_sweep","k":3,"n":100,"bogus":1}"#).unwrap();
    let out = bin(&["experiment", "--config", "cfg.json", "--out", "run"], dir.path());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn plot_rejects_empty_csv_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.csv"), "point,c,n,m\n").unwrap();
    let out = bin(&["plot", "--input", "empty.csv", "--out", "p.svg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("p.svg").exists());
}

#[test]
fn plot_hk_writes_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["plot", "--hk", "--out", "h.svg", "--csv", "h.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("h.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(std::fs::read_to_string(dir.path().join("h.csv")).unwrap().lines().count() > 10);
}

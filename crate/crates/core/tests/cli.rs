//! Binary and file surfaces: `run`, `validate`, `fit`, exit codes.

use olp_lab::analysis::{FitModel, FitResult};
use olp_lab::cli::{cmd_fit, cmd_run, cmd_validate, solver_cross_check};
use olp_lab::gens::ViolationKind;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_olp-lab");

fn minimal(out: &Path) -> String {
    format!(
        r#"seed = 7
reps = 2
n_grid = [250]
d0 = [0.25]
outputs = "{}"

[generator]
family = "stationary_uniform"

[[policies]]
kind = "resolve_single_sample"
"#,
        out.display()
    )
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn minimal_run_writes_two_rows_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "min.toml", &minimal(&dir.path().join("out")));
    let first = cmd_run(&cfg, Some(1), None).unwrap();
    let csv = fs::read_to_string(first.outputs.join("regret.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "n,policy,replication,offline_value,reward,regret,seed_branch");
    assert!(lines[1].starts_with("250,resolve_single_sample,0,"));
    assert!(!csv.contains('\r'));
    let again = cmd_run(&cfg, Some(3), Some(&dir.path().join("again"))).unwrap();
    assert_eq!(csv.as_bytes(), fs::read(again.outputs.join("regret.csv")).unwrap().as_slice());
    // each row's regret is offline − reward
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let (off, rew, reg): (f64, f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap());
        assert!((off - rew - reg).abs() < 1e-12);
        assert!(reg >= -1e-9);
    }
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", &minimal(&dir.path().join("out")));
    let o = Command::new(BIN).args(["run", good.to_str().unwrap()]).env("OLP_LAB_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("regret.csv"));
    assert!(dir.path().join("out/run_manifest.json").exists());

    let bad = write(dir.path(), "bad.toml", &minimal(&dir.path().join("out")).replace("[250]", "[500, 250]"));
    let o = Command::new(BIN).args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_grid not increasing"));

    let typo = write(dir.path(), "typo.toml", &minimal(&dir.path().join("out")).replace("reps = 2", "reps = 2\nrepz = 3"));
    let o = Command::new(BIN).args(["run", typo.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("repz") && err.contains("line"), "{err}");

    let missing = dir.path().join("missing.toml");
    let o = Command::new(BIN).args(["run", missing.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(4));

    let threads = Command::new(BIN).args(["run", good.to_str().unwrap()]).env("OLP_LAB_THREADS", "many").output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = minimal(&dir.path().join("a")).replace("n_grid = [250]", "n_grid = [100, 200, 300]").replace(
        "kind = \"resolve_single_sample\"",
        "kind = \"resolve_single_sample\"\n\n[[policies]]\nkind = \"fixed_price\"\np = [0.75]\n\n[analysis]\nfit = true\ndual_convergence = true",
    );
    let cfg = write(dir.path(), "exp.toml", &text);
    let a = cmd_run(&cfg, Some(2), None).unwrap();
    let b = cmd_run(&a.outputs.join("run_manifest.json"), Some(1), Some(&dir.path().join("b"))).unwrap();
    for f in ["regret.csv", "dual_convergence.csv", "fit.json"] {
        assert_eq!(fs::read(a.outputs.join(f)).unwrap(), fs::read(b.outputs.join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.outputs.join("regret.csv")).unwrap();
    assert!(csv.contains(",fixed_price:0.75,"));
}

#[test]
fn validate_reports_two_phase_smoothness_only() {
    let dir = tempfile::tempdir().unwrap();
    let stationary = write(dir.path(), "s.toml", &minimal(&dir.path().join("out")));
    let r = cmd_validate(&stationary).unwrap();
    assert!(r.generator_passed());
    assert!(r.solver_check.passed && r.solver_check.max_objective_gap < 1e-8);

    let two = minimal(&dir.path().join("out")).replace(
        "family = \"stationary_uniform\"",
        "family = \"two_phase\"\nvariant = \"p2\"",
    );
    let path = write(dir.path(), "p2.toml", &two);
    let r = cmd_validate(&path).unwrap();
    let kinds: Vec<ViolationKind> = r.violations.iter().map(|v| v.kind).collect();
    assert_eq!(kinds, vec![ViolationKind::TimeSmoothness]);
    assert!(r.render().contains("time-smoothness: FAIL"));
    assert!(r.render().contains("density-lower-bound: pass"));

    let o = Command::new(BIN).args(["validate", "--json", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violations"][0]["kind"], "time_smoothness");
}

#[test]
fn solver_cross_check_is_tight() {
    let c = solver_cross_check(50, 3).unwrap();
    assert_eq!(c.instances, 50);
    assert!(c.max_objective_gap < 1e-8);
}

fn regret_csv(dir: &Path, f: impl Fn(f64) -> f64) -> PathBuf {
    let mut text = String::from("n,policy,replication,offline_value,reward,regret,seed_branch\n");
    for n in [250usize, 500, 1000, 2000, 4000] {
        // two replications straddling the target mean
        let r = f(n as f64);
        for (k, v) in [r * 0.9, r * 1.1].iter().enumerate() {
            text += &format!("{n},resolve_single_sample,{k},{},{},{v},0\n", 100.0 + v, 100.0);
        }
    }
    write(dir, "regret.csv", &text)
}

#[test]
fn fit_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let poly = regret_csv(dir.path(), |n| 7.0 * n.ln().powi(2));
    let fit: FitResult = serde_json::from_str(&cmd_fit(&poly, FitModel::Polylog).unwrap()).unwrap();
    assert!((fit.exponent_or_coeff - 2.0).abs() < 1e-6);
    assert!((fit.r2 - 1.0).abs() < 1e-9);

    let lin = regret_csv(dir.path(), |n| 0.4 * n);
    let fit: FitResult = serde_json::from_str(&cmd_fit(&lin, FitModel::PowerLawN).unwrap()).unwrap();
    assert!((fit.exponent_or_coeff - 1.0).abs() < 1e-6);

    let o = Command::new(BIN).args(["fit", lin.to_str().unwrap(), "--model", "power"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let fit: FitResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(fit.grid, vec![250, 500, 1000, 2000, 4000]);

    let o = Command::new(BIN).args(["fit", lin.to_str().unwrap(), "--model", "cubic"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fit_of_a_real_run_keys_by_policy() {
    let dir = tempfile::tempdir().unwrap();
    let text = minimal(&dir.path().join("out")).replace("n_grid = [250]", "n_grid = [100, 200, 400]").replace(
        "kind = \"resolve_single_sample\"",
        "kind = \"resolve_single_sample\"\n\n[[policies]]\nkind = \"greedy_accept\"",
    );
    let cfg = write(dir.path(), "exp.toml", &text);
    let out = cmd_run(&cfg, Some(1), None).unwrap();
    let json = cmd_fit(&out.outputs.join("regret.csv"), FitModel::PowerLawN).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["greedy_accept"]["exponent_or_coeff"].is_number());
    assert!(v["resolve_single_sample"]["r2"].is_number());
}

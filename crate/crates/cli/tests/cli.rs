use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn stablab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablab")).current_dir(dir).args(args).env_remove("STABLAB_THREADS").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn suite_smoke_run_writes_report_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["suite", "--group", "appendix-a", "--samples", "10", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&dir.path().join("suite.json"));
    let manifest = json(&dir.path().join("suite.manifest.json"));
    let hash = manifest["manifest_hash"].as_str().unwrap();
    assert_eq!(report["manifest"], hash);
    assert_eq!(report["pass"], true);
    assert_eq!(manifest["exit_code"], 0);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["summary"].as_array().unwrap().iter().all(|s| s["pass"] == true));
    let csv = std::fs::read_to_string(dir.path().join("suite.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), format!("# manifest={hash}"));
}

#[test]
fn equal_runs_give_byte_identical_reports() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["suite", "--group", "harmonic", "--samples", "20", "--seed", "9"];
    for d in [&a, &b] {
        assert_eq!(stablab(d.path(), &args).status.code(), Some(0));
    }
    for f in ["suite.json", "suite.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn json_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stablab(dir.path(), &["suite", "--group", "appendix-c", "--samples", "5"]).status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("suite.json")).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["suite", "--group", "harmonic", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
}

#[test]
fn dimension_gate_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["check", "--estimate", "weighted_by_gradient", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("requires 3 ≤ n ≤ 9"), "{}", stderr(&o));
}

#[test]
fn failed_check_exits_two_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["check", "--estimate", "weighted_by_gradient", "--dim", "3", "--singular", "--nodes", "2000"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("witness"));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["pass"], false);
    assert_eq!(json(&dir.path().join("report.manifest.json"))["exit_code"], 2);
}

#[test]
fn branch_feeds_stability_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["branch", "--dim", "3", "--steps", "8", "--nodes", "256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("branch.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "s,lambda,u_max,stable,first_eigenvalue"));
    let o = stablab(dir.path(), &["stability", "--branch", "branch.csv", "--index", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep["first_eigenvalue"].as_f64().unwrap() > 0.0);
    let o = stablab(dir.path(), &["check", "--estimate", "hess_by_lapl", "--branch", "branch.csv", "--index", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = stablab(dir.path(), &["stability", "--branch", "branch.csv", "--index", "99"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bsolve_field_feeds_bcheck() {
    let dir = tempfile::tempdir().unwrap();
    let o = stablab(dir.path(), &["bsolve", "--lambda", "1", "--nl", "exp", "--grid", "32,16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let field = json(&dir.path().join("field.json"));
    assert_eq!(field["nl"], "exp");
    assert_eq!(field["lambda"], 1.0);
    let o = stablab(dir.path(), &["bcheck", "--estimate", "pohozaev_flux", "--field", "field.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(json(&dir.path().join("report.json"))["constant"].as_f64().unwrap().is_finite());
}

#[test]
fn reports_validate_against_the_shipped_schema() {
    let probe = Command::new("python3").args(["-c", "import jsonschema"]).output();
    if !probe.is_ok_and(|o| o.status.success()) {
        eprintln!("python3 with jsonschema not found; schema validation not run");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["check", "--estimate", "weighted_by_gradient", "--dim", "3", "--s", "1", "--nodes", "256", "--out", "a.json"],
        &["check", "--estimate", "weighted_by_gradient", "--dim", "3", "--singular", "--nodes", "2000", "--out", "b.json"],
        &["bsolve", "--lambda", "1", "--grid", "32,16", "--out", "field.json"],
    ];
    for args in runs {
        stablab(dir.path(), args);
    }
    stablab(dir.path(), &["bcheck", "--estimate", "pohozaev_flux", "--field", "field.json", "--out", "c.json"]);
    let root = workspace_root();
    let o = Command::new("python3")
        .current_dir(dir.path())
        .arg(root.join("scripts/validate_report.py"))
        .arg(root.join("schemas/estimate_report.schema.json"))
        .args(["a.json", "b.json", "c.json"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.conf"), "# sweep settings\ngroup = appendix-c\nsamples = 7\nseed = 3\n").unwrap();
    let o = stablab(dir.path(), &["suite", "--seed", "5", "--config", "run.conf"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&dir.path().join("suite.json"));
    assert_eq!(report["seed"], 5);
    assert_eq!(report["samples"], 7);
    assert_eq!(report["group"], "appendix-c");
}

#[test]
fn report_collects_pass_flags_and_refuses_an_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stablab(dir.path(), &["counterexample", "--which", "remark81", "--delta", "0.01", "--out", "r.json"]).status.code(), Some(0));
    assert_eq!(stablab(dir.path(), &["counterexample", "--which", "appendixE", "--out", "e.json"]).status.code(), Some(0));
    let o = stablab(dir.path(), &["report", "--inputs", "r.json", "e.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("summary.json"))["inputs"].as_array().unwrap().len(), 2);
    let o = stablab(dir.path(), &["report", "--out", "empty.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_stablab"))
            .current_dir(dir.path())
            .args(["suite", "--group", "appendix-c", "--samples", "3"])
            .env("STABLAB_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("1").status.code(), Some(0));
    assert_eq!(run("0").status.code(), Some(1));
}

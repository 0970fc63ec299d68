use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const REFERENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/reference.json");

fn sisfront(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sisfront"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn reference() -> Value {
    serde_json::from_str(&fs::read_to_string(REFERENCE).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn default_config_matches_shipped_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = sisfront(dir.path(), &["default-config"]);
    assert!(o.status.success());
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, reference());
}

#[test]
fn negative_diffusion_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference();
    cfg["d_I"] = Value::from(-1.0);
    let path = write_config(dir.path(), "bad.json", &cfg);
    let o = sisfront(
        &dir.path().join("out"),
        &["simulate", "--config", path.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("d_I"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference();
    cfg["numerics"]["timestep"] = Value::from(0.1);
    let path = write_config(dir.path(), "bad.json", &cfg);
    let o = sisfront(&dir.path().join("out"), &["r0", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("timestep"), "{}", stderr(&o));
}

#[test]
fn unparsable_expression_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference();
    cfg["gamma_expr"] = Value::from("1 + cos(x");
    let path = write_config(dir.path(), "bad.json", &cfg);
    let o = sisfront(
        &dir.path().join("out"),
        &["semiwave", "--config", path.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gamma_expr"), "{}", stderr(&o));
}

#[test]
fn r0_on_the_initial_interval_is_subcritical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sisfront(&out, &["r0", "--config", REFERENCE, "--interval", "-1", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("R0 on (-1, 1) = "))
        .expect("R0 line")
        .trim()
        .parse()
        .unwrap();
    assert!(value > 0.0 && value < 1.0, "{value}");

    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "r0");
    for artifact in manifest["artifacts"].as_array().unwrap() {
        assert!(out.join(artifact["file"].as_str().unwrap()).is_file());
        assert_eq!(artifact["config_sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn short_classify_run_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = reference();
    cfg["mu"] = Value::from(1.0);
    let path = write_config(dir.path(), "mu1.json", &cfg);
    let out = dir.path().join("out");
    let o = sisfront(&out, &["classify", "--config", path.to_str().unwrap(), "--t-end", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let verdict: Value = serde_json::from_slice(&fs::read(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "undetermined");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sisfront(&out, &["simulate", "--config", REFERENCE, "--t-end", "0.5"]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "fronts.csv"));
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn semiwave_reports_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sisfront(&out, &["semiwave", "--config", REFERENCE, "--profile"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("semiwave.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows.len(), 3, "{table}");
    assert!(rows[1..].iter().any(|r| r.starts_with("rightward")));
    assert!(rows[1..].iter().any(|r| r.starts_with("leftward")));
}

#[test]
fn reproduce_writes_one_directory_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sisfront(&out, &["reproduce-paper", "--t-end", "2"]);
    // the mu = 1 runs cannot be classified this early
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    for sub in ["mu6_alpha+1.5", "mu6_alpha-1.5", "mu1_alpha+1.5", "mu1_alpha-1.5"] {
        assert!(out.join(sub).join("fronts.csv").is_file(), "{sub}");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert_eq!(summary.matches(",spreading,").count(), 2);
}

#[test]
fn threshold_encloses_mu_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sisfront(
        &out,
        &[
            "threshold",
            "--config",
            REFERENCE,
            "--bracket",
            "1",
            "6",
            "--workers",
            "2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(out.join("threshold.json")).unwrap()).unwrap();
    let lo = report["mu_lo"].as_f64().unwrap();
    let hi = report["mu_hi"].as_f64().unwrap();
    assert!(1.0 <= lo && lo < hi && hi <= 6.0 && hi - lo <= 0.25, "{report}");
    assert!(fs::read_to_string(out.join("mu_scan.csv"))
        .unwrap()
        .contains("vanishing"));
}

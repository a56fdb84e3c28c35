//! End-to-end tests of the `abcd` binary: artifact layout, exit codes and
//! byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_abcd"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("abcd-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const QUADRATIC: &str = "\
[objective]
kind = diag-quadratic
diag = 1,4

[partition]
n = 2
sizes = equal

[schedule]
b = 5
mode = uniform-random
seed = 42

[run]
horizon = 100
gamma = auto
x0 = gaussian:7

[output]
dir = OUTDIR
";

fn code(out: &Output) -> i32 {
    out.status.code().expect("process must exit normally")
}

#[test]
fn run_quadratic_auto_gamma_succeeds() {
    let dir = tmp_dir("run-ok");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.join("out").to_str().unwrap()));
    let out = bin().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("bound pass"), "summary: {stdout}");
    for artifact in ["trace.csv", "report.json", "gap.svg"] {
        assert!(dir.join("out").join(artifact).exists(), "missing {artifact}");
    }
    let report = fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("\"informational\": false"));
}

#[test]
fn run_rejects_zero_delay_bound_with_key() {
    let dir = tmp_dir("run-b0");
    let cfg = write_config(
        &dir,
        "bad.cfg",
        &QUADRATIC.replace("b = 5", "b = 0").replace("OUTDIR", dir.to_str().unwrap()),
    );
    let out = bin().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("schedule.b"), "stderr: {stderr}");
}

#[test]
fn run_flags_divergence_with_exit_2() {
    let dir = tmp_dir("run-div");
    let cfg = write_config(
        &dir,
        "div.cfg",
        &QUADRATIC.replace("gamma = auto", "gamma = 1e6").replace("OUTDIR", dir.to_str().unwrap()),
    );
    let out = bin().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stepsize"), "stderr: {stderr}");
}

#[test]
fn identical_configs_produce_byte_identical_csv() {
    let dir = tmp_dir("determinism");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.join("ignored").to_str().unwrap()));
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let st = bin()
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&st), 0);
    }
    let a = fs::read(out_a.join("trace.csv")).unwrap();
    let b = fs::read(out_b.join("trace.csv")).unwrap();
    assert_eq!(a, b, "trace bytes differ between identical invocations");
    assert_eq!(
        fs::read(out_a.join("report.json")).unwrap(),
        fs::read(out_b.join("report.json")).unwrap()
    );
}

#[test]
fn sweep_writes_combined_artifacts_in_value_order() {
    let dir = tmp_dir("sweep");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.join("out").to_str().unwrap()));
    let out = bin()
        .args([
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--param",
            "B",
            "--values",
            "10,2,5",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("out/sweep.csv")).unwrap();
    let ids: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut seen = Vec::new();
    for id in ids {
        if seen.last() != Some(&id) {
            seen.push(id);
        }
    }
    assert_eq!(seen, vec!["B=2", "B=5", "B=10"], "runs must be ordered by value");
    assert!(dir.join("out/sweep.svg").exists());
}

#[test]
fn sweep_rejects_empty_values() {
    let dir = tmp_dir("sweep-empty");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.to_str().unwrap()));
    let out = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "B", "--values", ""])
        .output()
        .unwrap();
    assert_ne!(code(&out), 0);
}

#[test]
fn sweep_rejects_unknown_param() {
    let dir = tmp_dir("sweep-param");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.to_str().unwrap()));
    let out = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "delay", "--values", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn check_unknown_suite_is_usage_error() {
    let out = bin().args(["check", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn check_schedule_suite_passes() {
    let out = bin().args(["check", "--suite", "schedule"]).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}

#[test]
fn check_grad_and_theorem_suites_pass() {
    for suite in ["grad", "theorem"] {
        let out = bin().args(["check", "--suite", suite]).output().unwrap();
        assert_eq!(
            code(&out),
            0,
            "suite {suite} stderr: {} stdout: {}",
            String::from_utf8_lossy(&out.stderr),
            String::from_utf8_lossy(&out.stdout)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
    }
}

#[test]
fn sweep_over_seeds_gives_distinct_convergent_curves() {
    let dir = tmp_dir("sweep-seed");
    let cfg = write_config(
        &dir,
        "q.cfg",
        &QUADRATIC
            .replace("gamma = auto", "gamma = 0.1")
            .replace("horizon = 100", "horizon = 400")
            .replace("OUTDIR", dir.join("out").to_str().unwrap()),
    );
    let out = bin()
        .args(["sweep", "--config", cfg.to_str().unwrap(), "--param", "seed", "--values", "1,2,3,4,5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("out/sweep.csv")).unwrap();
    // five runs, distinct gap trajectories, all ending at a small gap
    let mut curves: std::collections::BTreeMap<String, Vec<u64>> = std::collections::BTreeMap::new();
    let mut finals = std::collections::BTreeMap::new();
    for line in csv.lines().skip(1) {
        let mut cols = line.split(',');
        let id = cols.next().unwrap().to_string();
        let t: usize = cols.next().unwrap().parse().unwrap();
        let gap: f64 = cols.nth(1).unwrap().parse().unwrap();
        curves.entry(id.clone()).or_default().push(gap.to_bits());
        if t == 399 {
            finals.insert(id, gap);
        }
    }
    assert_eq!(finals.len(), 5);
    for (id, gap) in &finals {
        assert!(*gap < 1e-6, "{id} did not converge: final gap {gap}");
    }
    let unique: std::collections::BTreeSet<&Vec<u64>> = curves.values().collect();
    assert_eq!(unique.len(), 5, "seeds must produce pairwise distinct trajectories");
}

#[test]
fn report_regenerates_svg_without_touching_numbers() {
    let dir = tmp_dir("report");
    let cfg = write_config(&dir, "q.cfg", &QUADRATIC.replace("OUTDIR", dir.join("out").to_str().unwrap()));
    let st = bin().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(code(&st), 0);
    let csv_path = dir.join("out/trace.csv");
    let before = fs::read(&csv_path).unwrap();
    let svg_path = dir.join("regen.svg");
    let out = bin()
        .args(["report", "--in", csv_path.to_str().unwrap(), "--svg", svg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(svg_path.exists());
    assert_eq!(before, fs::read(&csv_path).unwrap(), "report must not rewrite the CSV");
}

#[test]
fn report_rejects_malformed_csv() {
    let dir = tmp_dir("report-bad");
    let bad = dir.join("bad.csv");
    fs::write(&bad, "not,a,trace\n1,2,3\n").unwrap();
    let out = bin()
        .args(["report", "--in", bad.to_str().unwrap(), "--svg", dir.join("x.svg").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

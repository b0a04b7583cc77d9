use mcgap::report::{CoverageReport, EstimationReport, TruthReport};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn mcgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcgap"))
        .args(args)
        .output()
        .expect("spawn mcgap")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn estimate_short_path() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "path.txt", "0 1 0 0 1 1 0 1 0 1\n");
    let out = mcgap(&["estimate", "--input", p(&input), "--delta", "0.1"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: EstimationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.inputs.n, 10);
    assert_eq!(report.inputs.d, 2);
    assert!(report.inputs.d_inferred);
    assert_eq!(report.pi_hat.len(), 2);

    // Round trip through the typed report.
    let again = serde_json::to_string(&report).unwrap();
    let back: EstimationReport = serde_json::from_str(&again).unwrap();
    assert_eq!(back, report);
}

#[test]
fn bad_delta_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "path.txt", "0 1 0 1\n");
    let out = mcgap(&["estimate", "--input", p(&input), "--delta", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--delta"));
}

#[test]
fn bad_paths_are_input_errors() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("empty", ""),
        ("neg", "0 -1 0"),
        ("one", "0"),
        ("junk", "0 x 1"),
    ] {
        let input = write(&dir, name, text);
        let out = mcgap(&["estimate", "--input", p(&input), "--delta", "0.1"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    let input = write(&dir, "range", "0 1 2 0");
    let out = mcgap(&[
        "estimate",
        "--input",
        p(&input),
        "--delta",
        "0.1",
        "--num-states",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible_and_reports_truth() {
    let dir = TempDir::new().unwrap();
    let truth = dir.path().join("truth.json");
    let args = [
        "simulate",
        "--chain",
        "birth-death",
        "--d",
        "2",
        "--up",
        "0.3",
        "--down",
        "0.2",
        "--n",
        "1000",
        "--seed",
        "7",
    ];
    let a = mcgap(&args);
    let mut with_truth = args.to_vec();
    with_truth.extend(["--emit-truth", p(&truth)]);
    let b = mcgap(&with_truth);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines = String::from_utf8(a.stdout).unwrap();
    assert_eq!(lines.lines().filter(|l| !l.starts_with('#')).count(), 1000);

    let t: TruthReport = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert!((t.gap.0 - 0.5).abs() < 1e-12);
    assert!((t.pi[0].0 - 0.4).abs() < 1e-12);
}

#[test]
fn nonreversible_matrix_requires_opt_in() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "p.csv", "0.1,0.6,0.3\n0.3,0.1,0.6\n0.6,0.3,0.1\n");
    let base = [
        "simulate",
        "--chain",
        "file",
        "--matrix",
        p(&m),
        "--n",
        "100",
    ];
    assert_eq!(mcgap(&base).status.code(), Some(2));
    let mut allowed = base.to_vec();
    allowed.push("--allow-nonreversible");
    assert_eq!(mcgap(&allowed).status.code(), Some(0));
}

#[test]
fn coverage_rejects_zero_trials() {
    let out = mcgap(&[
        "coverage",
        "--chain",
        "birth-death",
        "--d",
        "2",
        "--up",
        "0.3",
        "--down",
        "0.2",
        "--n",
        "100",
        "--delta",
        "0.1",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coverage_output_does_not_depend_on_jobs() {
    let run = |jobs: &str| {
        mcgap(&[
            "coverage",
            "--chain",
            "birth-death",
            "--d",
            "3",
            "--up",
            "0.3",
            "--down",
            "0.25",
            "--n",
            "3000",
            "--delta",
            "0.1",
            "--trials",
            "16",
            "--seed",
            "5",
            "--jobs",
            jobs,
        ])
    };
    let a = run("1");
    let b = run("8");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: CoverageReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report.trials, 16);
    assert_eq!(report.d, 3);
}

#[test]
fn estimate_brackets_true_gap_on_simulated_path() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("path.txt");
    let truth = dir.path().join("truth.json");
    let sim = mcgap(&[
        "simulate",
        "--chain",
        "birth-death",
        "--d",
        "5",
        "--up",
        "0.3,0.25,0.4,0.2",
        "--down",
        "0.2,0.35,0.3,0.45",
        "--n",
        "100000",
        "--seed",
        "3",
        "--output",
        p(&path),
        "--emit-truth",
        p(&truth),
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let out = mcgap(&[
        "estimate",
        "--input",
        p(&path),
        "--delta",
        "0.1",
        "--num-states",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: EstimationReport = serde_json::from_slice(&out.stdout).unwrap();
    let t: TruthReport = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert!((r.gap_hat.0 - t.gap.0).abs() <= r.w_hat.0);
    assert!(!r.inputs.d_inferred);
}

use std::path::{Path, PathBuf};
use std::process::Command;

use hsdipm_cli::run;
use serde_json::Value;
use tempfile::TempDir;

const SMALL_LP: &str = r#"{"m":1,"n":2,"A":[5,-3],"b":[12],"c":[2,3],"cones":[{"type":"nonneg","dim":2}]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn call(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["hsdipm"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_small_lp() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "lp.json", SMALL_LP);
    let (code, out, _) = call(&[
        "solve",
        "--problem",
        path_str(&problem),
        "--preset",
        "1",
        "--eps",
        "1e-8",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "optimal");
    let obj = v["primal_objective"].as_f64().unwrap();
    assert!((obj - 4.8).abs() <= 1e-6 * 4.8);
    assert!(v["iterations"].as_u64().unwrap() > 0);
    assert!(v["mu"].as_f64().unwrap() > 0.0);
}

#[test]
fn trace_has_header_and_one_row_per_step() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "lp.json", SMALL_LP);
    let trace = dir.path().join("trace.csv");
    let (code, out, _) = call(&[
        "solve",
        "--problem",
        path_str(&problem),
        "--preset",
        "2",
        "--max-iters",
        "7",
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(code, 5);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "iteration-limit");
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("iter,phase,alpha,mu,residual_norm,proximity,wall_ms")
    );
    let rows: Vec<&str> = lines.collect();
    // Preset 2 takes two corrector steps per predictor.
    assert_eq!(rows.len(), 7 * 3);
    assert!(rows[0].starts_with("1,predictor,"));
    assert!(rows[1].starts_with("1,corrector,1,"));
}

#[test]
fn infeasible_statuses_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let primal = write(
        &dir,
        "p.json",
        r#"{"m":1,"n":2,"A":[1,1],"b":[-1],"c":[1,1],"cones":[{"type":"nonneg","dim":2}]}"#,
    );
    let (code, out, _) = call(&["solve", "--problem", path_str(&primal)]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"]["kind"], "primal-infeasibility");

    let dual = write(
        &dir,
        "d.json",
        r#"{"m":1,"n":2,"A":[1,-1],"b":[0],"c":[-1,0],"cones":[{"type":"nonneg","dim":2}]}"#,
    );
    let (code, out, _) = call(&["solve", "--problem", path_str(&dual)]);
    assert_eq!(code, 3);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"]["kind"], "dual-infeasibility");
}

#[test]
fn usage_and_input_errors() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "lp.json", SMALL_LP);
    assert_eq!(
        call(&["solve", "--problem", path_str(&problem), "--preset", "3"]).0,
        64
    );
    assert_eq!(
        call(&["solve", "--problem", path_str(&problem), "--eps", "-1"]).0,
        64
    );
    assert_eq!(call(&["solve"]).0, 64);
    assert_eq!(call(&["frobnicate"]).0, 64);
    assert_eq!(call(&["verify", "--suite", "bogus"]).0, 64);
    assert_eq!(call(&["--help"]).0, 0);

    let missing = dir.path().join("missing.json");
    let (code, _, err) = call(&["solve", "--problem", path_str(&missing)]);
    assert_eq!(code, 65);
    assert!(err.contains("missing.json"));

    let broken = write(&dir, "broken.json", "{\"m\": 1,\n \"n\": }");
    let (code, _, err) = call(&["solve", "--problem", path_str(&broken)]);
    assert_eq!(code, 65);
    assert!(err.contains("line 2"), "{err}");

    let short = write(
        &dir,
        "short.json",
        r#"{"m":1,"n":2,"A":[5,-3],"b":[12],"c":[2,3],"cones":[{"type":"nonneg","dim":1}]}"#,
    );
    let (code, _, err) = call(&["solve", "--problem", path_str(&short)]);
    assert_eq!(code, 65);
    assert!(err.contains("cones"), "{err}");
}

#[test]
fn verify_counterexamples() {
    let (code, out, _) = call(&["verify", "--suite", "counterexamples"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines()
            .filter(|l| l.starts_with("violation reproduced"))
            .count(),
        2
    );
}

#[test]
fn verify_smoke_run_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let r1 = dir.path().join("r1.txt");
    let r2 = dir.path().join("r2.txt");
    let (c1, out1, _) = call(&[
        "verify",
        "--suite",
        "all",
        "--samples",
        "10",
        "--seed",
        "42",
        "--report",
        path_str(&r1),
    ]);
    let (c2, out2, _) = call(&[
        "verify",
        "--suite",
        "all",
        "--samples",
        "10",
        "--seed",
        "42",
        "--report",
        path_str(&r2),
    ]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(out1, out2);
    let a = std::fs::read(&r1).unwrap();
    assert_eq!(a, std::fs::read(&r2).unwrap());
    assert!(!a.is_empty());
    assert!(String::from_utf8(a)
        .unwrap()
        .lines()
        .all(|l| l.starts_with("PASS ")));
}

#[test]
fn verify_single_suites() {
    for suite in ["selfconcordance", "predictor", "corrector"] {
        let (code, out, _) = call(&["verify", "--suite", suite, "--samples", "5"]);
        assert_eq!(code, 0, "{suite}");
        assert!(out.lines().all(|l| !l.starts_with("FAIL")));
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hsdipm");
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "lp.json", SMALL_LP);
    let ok = Command::new(bin)
        .args(["solve", "--problem", path_str(&problem)])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin)
        .args(["solve", "--preset", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

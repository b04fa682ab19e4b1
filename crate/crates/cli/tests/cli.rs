//! End-to-end tests of the `ptsim` binary: output contracts, determinism,
//! and exit codes.

use std::process::{Command, Output};

fn ptsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptsim"))
        .args(args)
        .env_remove("PTSIM_THREADS")
        .output()
        .expect("failed to spawn ptsim")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Pull the numeric value out of a `label = value` line.
fn extract(text: &str, label: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.contains(label))
        .unwrap_or_else(|| panic!("no line containing {label:?} in:\n{text}"));
    line.rsplit(['=', '('])
        .next()
        .unwrap()
        .trim()
        .trim_end_matches(')')
        .parse()
        .unwrap_or_else(|e| panic!("cannot parse value from {line:?}: {e}"))
}

#[test]
fn demo_hermitian_point() {
    let out = ptsim(&["demo", "--alpha", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Hermitian: no-signaling holds"), "{text}");
    assert!(text.contains("signaling gap (numeric)  = 0.000000000000"), "{text}");
}

#[test]
fn demo_gap_at_pi_over_six() {
    // 0.5236 is π/6 to four decimals; the exact magnitude there is
    // 0.8000010179…, so the bound accommodates the truncated input.
    let out = ptsim(&["demo", "--alpha", "0.5236"]);
    assert!(out.status.success());
    let gap = extract(&stdout(&out), "signaling gap (numeric)");
    assert!((gap.abs() - 0.8).abs() <= 2e-6, "gap {gap}");

    // At α = π/6 itself the magnitude is 0.8 to machine precision.
    let exact = ptsim(&["demo", "--alpha", "0.5235987755982988"]);
    let gap = extract(&stdout(&exact), "signaling gap (numeric)");
    assert!((gap.abs() - 0.8).abs() <= 1e-12, "gap {gap}");
}

#[test]
fn demo_extreme_case() {
    let out = ptsim(&["demo", "--alpha", "-1.5707863"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let gap = extract(&text, "signaling gap (numeric)");
    assert!((gap - 1.0).abs() <= 1e-6, "gap {gap}");
    // Bob's A+ state is |+y><+y| = [[1/2, -i/2], [i/2, 1/2]].
    assert!(text.contains("0.5+0i  0-0.5i"), "{text}");
}

#[test]
fn demo_degrees_flag_converts_input() {
    let rad = ptsim(&["demo", "--alpha", "0.5235987755982988"]);
    let deg = ptsim(&["demo", "--alpha", "30", "--degrees"]);
    assert_eq!(stdout(&rad), stdout(&deg));
}

#[test]
fn demo_is_byte_deterministic() {
    let a = ptsim(&["demo", "--alpha", "0.9", "--s", "2"]);
    let b = ptsim(&["demo", "--alpha", "0.9", "--s", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn demo_rejects_trivial_scale() {
    let out = ptsim(&["demo", "--alpha", "0.3", "--s", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demo_rejects_the_breaking_point() {
    let out = ptsim(&["demo", "--alpha", "1.5708"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("breaking point"));
}

#[test]
fn demo_metric_normalization_keeps_the_violation() {
    let out = ptsim(&[
        "demo",
        "--alpha",
        "0.7853981633974483",
        "--normalization",
        "pt-metric",
    ]);
    assert!(out.status.success());
    let gap = extract(&stdout(&out), "signaling gap (numeric)");
    assert!(gap.abs() > 0.1, "gap {gap}");
}

#[test]
fn sweep_csv_contract() {
    let out = ptsim(&["sweep", "--alpha-start", "-0.5", "--alpha-end", "0.5", "--steps", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,gap_analytic,gap_numeric,marginal_plus,marginal_minus,bob_trace_distance"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]), "rows must ascend in alpha");
    // Middle row is alpha = 0: both gaps vanish to 12 digits.
    assert_eq!(rows[1][0], 0.0);
    assert!(rows[1][1].abs() <= 1e-12);
    assert!(rows[1][2].abs() <= 1e-12);
}

#[test]
fn sweep_json_mirrors_record_fields() {
    let out = ptsim(&[
        "sweep",
        "--alpha-start",
        "-0.5",
        "--alpha-end",
        "0.5",
        "--steps",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let records = parsed.as_array().unwrap();
    assert_eq!(records.len(), 3);
    for r in records {
        for key in [
            "alpha",
            "gap_analytic",
            "gap_numeric",
            "marginal_plus",
            "marginal_minus",
            "bob_trace_distance",
        ] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
    }
}

#[test]
fn sweep_csv_round_trips_against_json() {
    let args = ["--alpha-start", "-1.1", "--alpha-end", "1.1", "--steps", "7"];
    let csv = stdout(&ptsim(&[&["sweep"], &args[..], &["--format", "csv"]].concat()));
    let json = stdout(&ptsim(&[&["sweep"], &args[..], &["--format", "json"]].concat()));
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let records = parsed.as_array().unwrap();

    let keys = ["alpha", "gap_analytic", "gap_numeric", "marginal_plus", "marginal_minus", "bob_trace_distance"];
    for (line, record) in csv.lines().skip(1).zip(records) {
        for (value, key) in line.split(',').zip(keys) {
            let from_csv: f64 = value.parse().unwrap();
            let full = record[key].as_f64().unwrap();
            let tol = 1e-12 * full.abs().max(1.0);
            assert!(
                (from_csv - full).abs() <= tol,
                "{key}: csv {from_csv} vs json {full}"
            );
        }
    }
}

#[test]
fn sweep_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("ptsim-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let args = ["sweep", "--alpha-start", "0", "--alpha-end", "1", "--steps", "4"];
    let to_stdout = stdout(&ptsim(&args));
    let with_file = ptsim(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert!(with_file.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), to_stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_reports_unwritable_output_path() {
    let out = ptsim(&[
        "sweep",
        "--alpha-start",
        "0",
        "--alpha-end",
        "1",
        "--steps",
        "3",
        "--output",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent-dir/sweep.csv"));
}

#[test]
fn sweep_invalid_range_is_a_usage_error() {
    let out = ptsim(&["sweep", "--alpha-start", "1", "--alpha-end", "0", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_clipping_warns_on_stderr_only() {
    let out = ptsim(&["sweep", "--alpha-start", "-2", "--alpha-end", "2", "--steps", "3"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("clipped"));
    assert!(!stdout(&out).contains("clipped"));
}

#[test]
fn sweep_pt_metric_normalization_mode() {
    let out = ptsim(&[
        "sweep",
        "--alpha-start",
        "-0.9",
        "--alpha-end",
        "0.9",
        "--steps",
        "5",
        "--normalization",
        "pt-metric",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // The violation survives metric normalization.
        assert!((v[1] - v[2]).abs() <= 1e-10, "analytic vs numeric in {line}");
    }
}

#[test]
fn metric_hermitian_point_is_identity() {
    let out = ptsim(&["metric", "--alpha", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("eta eigenvalues: 1, 1"), "{text}");
}

#[test]
fn metric_residuals_are_small() {
    let out = ptsim(&["metric", "--alpha", "0.5236"]);
    let text = stdout(&out);
    assert!(extract(&text, "H^dag eta - eta H") <= 1e-10);
    assert!(extract(&text, "h' - h'^dag") <= 1e-10);
}

#[test]
fn metric_breaking_point_is_a_domain_error() {
    let out = ptsim(&["metric", "--alpha", "1.5708"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("breaking point"), "{}", stderr(&out));
}

#[test]
fn verify_passes_at_default_tolerance() {
    let out = ptsim(&["verify", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("RESULT: PASS"));
    // One line per invariant.
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
}

#[test]
fn verify_fails_at_impossible_tolerance() {
    let out = ptsim(&["verify", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("RESULT: FAIL"));
}

#[test]
fn sample_is_byte_deterministic() {
    let args = ["sample", "--alpha", "0.5236", "--bit", "plus", "--shots", "100", "--seed", "7"];
    let a = ptsim(&args);
    let b = ptsim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_fair_coin_at_alpha_zero() {
    let out = ptsim(&["sample", "--alpha", "0", "--bit", "plus", "--shots", "1000000", "--seed", "3"]);
    let p_hat = extract(&stdout(&out), "p_hat(+y)");
    assert!((p_hat - 0.5).abs() <= 0.005, "p_hat {p_hat}");
}

#[test]
fn sample_extreme_case_is_nearly_deterministic() {
    let out = ptsim(&[
        "sample",
        "--alpha",
        "-1.5707953267948966",
        "--bit",
        "plus",
        "--shots",
        "1000",
        "--seed",
        "11",
    ]);
    let p_hat = extract(&stdout(&out), "p_hat(+y)");
    assert!(p_hat >= 0.99, "p_hat {p_hat}");
}

#[test]
fn sample_rejects_zero_shots() {
    let out = ptsim(&["sample", "--alpha", "0", "--bit", "plus", "--shots", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_ptsim"))
        .args(["sweep", "--alpha-start", "0", "--alpha-end", "1", "--steps", "3"])
        .env("PTSIM_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let capped = Command::new(env!("CARGO_BIN_EXE_ptsim"))
        .args(["sweep", "--alpha-start", "0", "--alpha-end", "1", "--steps", "3"])
        .env("PTSIM_THREADS", "1")
        .output()
        .unwrap();
    assert!(capped.status.success());
    let free = ptsim(&["sweep", "--alpha-start", "0", "--alpha-end", "1", "--steps", "3"]);
    assert_eq!(capped.stdout, free.stdout, "parallelism must not change output");
}

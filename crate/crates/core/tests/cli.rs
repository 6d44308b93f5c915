use coherence_lab::cli::{run_with, EXIT_PASS, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("coherence-lab")
        .chain(args.iter().copied())
        .map(String::from);
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &std::path::Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn quantify_diagonal_state_is_incoherent() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(
        dir.path(),
        "state.json",
        r#"{"dim": 3, "re": [0.2,0,0, 0,0.3,0, 0,0,0.5]}"#,
    );
    let frame = write(
        dir.path(),
        "frame.json",
        r#"{"kind": "basis", "vectors": [{"re": [1,0,0]}, {"re": [0,1,0]}, {"re": [0,0,1]}]}"#,
    );
    let (code, out, err) = call(&[
        "--format", "json", "quantify", "--state", &state, "--frame", &frame, "--alpha", "0.5,1,2",
    ]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!(r["value"].as_f64().unwrap().abs() < 1e-8, "{r}");
    }
}

#[test]
fn quantify_plus_state_against_a_projector_frame() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "state.json", r#"{"dim": 2, "re": [0.5,0.5,0.5,0.5]}"#);
    let frame = write(
        dir.path(),
        "frame.json",
        r#"{"kind": "projectors", "projectors": [{"dim": 2, "re": [1,0,0,0]}, {"dim": 2, "re": [0,0,0,1]}]}"#,
    );
    let (code, out, _) = call(&["quantify", "--state", &state, "--frame", &frame, "--alpha", "1"]);
    assert_eq!(code, EXIT_PASS);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "kind,alpha,value,printed,residual");
    // no representation basis: no ℓ1 row
    assert!(!out.contains("\nl1,"));
    let relent: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(relent[0], "relative-entropy");
    assert!((relent[2].parse::<f64>().unwrap() - std::f64::consts::LN_2).abs() < 1e-11);
}

#[test]
fn quantify_rejects_mismatched_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "state.json", r#"{"dim": 2, "re": [1,0,0,0]}"#);
    let frame = write(
        dir.path(),
        "frame.json",
        r#"{"kind": "basis", "vectors": [{"re": [1,0,0]}, {"re": [0,1,0]}, {"re": [0,0,1]}]}"#,
    );
    assert_eq!(
        call(&["quantify", "--state", &state, "--frame", &frame]).0,
        EXIT_USAGE
    );
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(
        call(&["quantify", "--state", &bad, "--frame", &frame]).0,
        EXIT_USAGE
    );
}

#[test]
fn theorem1_small_run_has_no_violations() {
    let (code, out, err) = call(&["verify", "theorem1", "--dims", "2,3", "--trials", "50"]);
    assert_eq!(code, EXIT_PASS, "{err}");
    for line in out.lines().skip(2) {
        let gap: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(gap <= 1e-6);
    }
}

#[test]
fn sweep_alpha2_min_matches_theta_states() {
    let (code, out, _) = call(&[
        "sweep-usd",
        "--alphas",
        "2",
        "--eta-grid",
        "9",
        "--n-vartheta",
        "181",
        "--n-varphi",
        "361",
    ]);
    assert_eq!(code, EXIT_PASS);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert!((r[3] - r[4]).abs() <= 1e-5, "{r:?}");
    }
}

#[test]
fn sweep_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, _, _) = call(&[
            "--seed",
            "3",
            "sweep-usd",
            "--alphas",
            "0.5,1",
            "--eta-grid",
            "4",
            "--n-vartheta",
            "91",
            "--n-varphi",
            "181",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_PASS);
    }
    for name in ["usd_alpha_0.5.csv", "usd_alpha_1.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn property_run_reports_each_suite() {
    let (code, out, err) = call(&[
        "verify",
        "properties",
        "--which",
        "scaling,hierarchy",
        "--trials",
        "10",
    ]);
    assert_eq!(code, EXIT_PASS, "{err}");
    assert!(out.contains("\nscaling,10,"));
    assert!(out.contains("\nhierarchy,10,"));
    assert_eq!(err.lines().count(), 2);
}

#[test]
fn discrepancy_report_is_structured_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disc.json");
    let (code, _, err) = call(&[
        "--report-discrepancies",
        path.to_str().unwrap(),
        "--discrepancy-states",
        "3",
        "example-spin",
        "--grid",
        "2",
        "--phases",
        "1",
    ]);
    assert_eq!(code, EXIT_PASS, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let min2 = v["min2"].as_array().unwrap();
    assert_eq!(min2.len(), 5);
    for m in min2 {
        let derived = m["derived"].as_f64().unwrap();
        assert!((m["numeric"].as_f64().unwrap() - derived).abs() < 1e-5);
        assert!(m["printed"].as_f64().unwrap() > derived);
    }
    assert_eq!(v["theorem1_degenerate"]["states"], 3);
    assert!(v["spectral_sum_formula"]["cases"].as_u64().unwrap() == 9);
}

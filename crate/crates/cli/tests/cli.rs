use std::fs;
use std::path::Path;

use qcrb_kit::Table;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["qcrb-kit"];
    full.extend_from_slice(args);
    let code = qcrb_kit::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MIXTURE: &str = r#"{"kind":"qubit_mixture","dim":2,
    "psi1":{"name":"rotation"},
    "weight":{"form":"constant","params":[0.9]}}"#;

#[test]
fn compute_rotation_values() {
    let (code, out, _) = run(&["compute", "--builtin", "qubit-rotation", "--theta", "0.3"]);
    assert_eq!(code, 0);
    let t = Table::from_csv(&out).unwrap();
    assert_eq!(t.command, "compute");
    assert!((t.floats("i_h").unwrap()[0].unwrap() - 4.0).abs() < 1e-12);
    assert!((t.floats("i_wy").unwrap()[0].unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn compute_from_config_file_with_grid() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.json", MIXTURE);
    let (code, out, err) = run(&["compute", "--model", &model, "--theta-grid", "-0.5:0.5:3"]);
    assert_eq!(code, 0, "{err}");
    let t = Table::from_csv(&out).unwrap();
    assert_eq!(t.rows.len(), 3);
    for g in t.floats("gap").unwrap() {
        assert!((g.unwrap() - 0.64).abs() < 1e-9);
    }
}

#[test]
fn csv_and_json_outputs_round_trip() {
    let cases: [&[&str]; 4] = [
        &[
            "compute",
            "--builtin",
            "spectral-random(3, 4)",
            "--theta-grid",
            "-1:1:5",
        ],
        &["sweep-w", "--w-grid", "0.1:0.9:9"],
        &[
            "sweep-spectrum",
            "--start",
            "0.5,0.3,0.2",
            "--t-grid",
            "0:1:4",
        ],
        &["verify"],
    ];
    for args in cases {
        for format in ["csv", "json"] {
            let mut a = args.to_vec();
            a.extend(["--format", format]);
            let (code, out, err) = run(&a);
            assert_eq!(code, 0, "{args:?}: {err}");
            let t = Table::parse(&out).unwrap();
            let again = t.render(if format == "csv" {
                qcrb_kit::OutputFormat::Csv
            } else {
                qcrb_kit::OutputFormat::Json
            });
            assert_eq!(again.unwrap(), out, "{args:?} {format}");
        }
    }
}

#[test]
fn csv_and_json_carry_the_same_table() {
    let (_, csv, _) = run(&["sweep-w", "--format", "csv"]);
    let (_, json, _) = run(&["sweep-w", "--format", "json"]);
    let a = Table::from_csv(&csv).unwrap();
    let b = Table::from_json(&json).unwrap();
    assert_eq!(a.columns, b.columns);
    assert_eq!(a.tolerances, b.tolerances);
    assert_eq!(a.floats("gap"), b.floats("gap"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["sweep-w", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (_, direct, _) = run(&["sweep-w"]);
    assert_eq!(fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn simulate_is_seed_deterministic() {
    let base = [
        "simulate",
        "--builtin",
        "qubit-rotation",
        "--theta",
        "0.3",
        "--samples",
        "5000",
    ];
    let with_seed = |s: &str| {
        let mut a = base.to_vec();
        a.extend(["--seed", s]);
        let (code, out, _) = run(&a);
        assert_eq!(code, 0);
        out
    };
    assert_eq!(with_seed("7"), with_seed("7"));
    assert_ne!(with_seed("7"), with_seed("8"));
}

#[test]
fn simulate_json_has_result() {
    let (code, out, _) = run(&[
        "simulate",
        "--builtin",
        "qubit-rotation",
        "--theta",
        "0.3",
        "--samples",
        "2000",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["format"], "qcrb-kit v1");
    assert_eq!(v["command"], "simulate");
    assert!((v["result"]["crb"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.json",
        "{\"kind\": \"pure\",\n  \"dim\": }",
    );
    let (code, _, err) = run(&["compute", "--model", &broken, "--theta", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");

    let unknown = write(
        dir.path(),
        "u.json",
        r#"{"kind":"pure","psi1":{"name":"helix"}}"#,
    );
    let (code, _, err) = run(&["compute", "--model", &unknown, "--theta", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("helix"), "{err}");

    for args in [
        &["compute", "--builtin", "no-such-model", "--theta", "0"][..],
        &[
            "compute",
            "--model",
            "/nonexistent/model.json",
            "--theta",
            "0",
        ],
        &["sweep-w", "--w-grid", "0:1:3"],
        &["sweep-w", "--w-grid", "0.9:0.5:3"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).0, 1, "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let trivial = write(
        dir.path(),
        "trivial.json",
        r#"{"kind":"explicit","dim":2,"effects":[[[1,0],[0,1]]]}"#,
    );
    let (code, _, err) = run(&[
        "simulate",
        "--builtin",
        "qubit-rotation",
        "--theta",
        "0.3",
        "--povm",
        &trivial,
    ]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(run(&["verify", "--mutate", "trace_one"]).0, 2);
    assert_eq!(run(&["verify", "--inject-corrupt-trace", "1.5"]).0, 2);
}

#[test]
fn verify_tolerance_override() {
    let (code, out, _) = run(&["verify", "--tol", "1e-14"]);
    assert_eq!(code, 2);
    let t = Table::from_csv(&out).unwrap();
    assert!(t
        .tolerances
        .iter()
        .filter(|(k, _)| *k != "fd_step")
        .all(|(_, &v)| v == 1e-14));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

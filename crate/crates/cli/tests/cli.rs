use assert_cmd::Command;
use nct_gabor::{Lattice2D, Side, TwistedElement};
use serde_json::Value;

fn cli() -> Command {
    Command::cargo_bin("nct-gabor").unwrap()
}

fn json(out: &[u8]) -> Value {
    serde_json::from_slice(out).unwrap()
}

#[test]
fn frame_bounds_reports_positive_lower_bound() {
    let out = cli()
        .args([
            "frame-bounds",
            "--window",
            "gaussian",
            "--lattice",
            "1,0,0,0.75",
        ])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert!(v["A"].as_f64().unwrap() > 0.0);
    assert!(v["B"].as_f64().unwrap() >= v["A"].as_f64().unwrap());
    assert_eq!(v["is_frame"], Value::Bool(true));
    assert_eq!(v["config"]["command"], "frame-bounds");
    assert_eq!(v["config"]["radius"].as_f64(), Some(6.0));
}

#[test]
fn frame_bounds_at_critical_density_exits_two() {
    cli()
        .args([
            "frame-bounds",
            "--window",
            "gaussian",
            "--lattice",
            "1,0,0,1.0",
        ])
        .assert()
        .code(2);
}

#[test]
fn malformed_lattice_names_the_token() {
    let out = cli()
        .args(["frame-bounds", "--lattice", "1,0,x,0.75"])
        .assert()
        .code(1)
        .get_output()
        .stderr
        .clone();
    assert!(String::from_utf8(out).unwrap().contains("'x'"));
}

#[test]
fn usage_errors_exit_one() {
    cli().args(["no-such-command"]).assert().code(1);
    cli()
        .args(["frame-bounds", "--radius", "abc"])
        .assert()
        .code(1);
    cli()
        .args(["frame-bounds", "--radius", "-1"])
        .assert()
        .code(1);
    cli()
        .env("NCT_GABOR_THREADS", "zero")
        .args(["frame-bounds"])
        .assert()
        .code(1);
}

#[test]
fn project_certifies_and_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let elem = dir.path().join("p.json");
    let out = cli()
        .env("NCT_GABOR_THREADS", "2")
        .args(["project", "--lattice", "1,0,0,0.5", "--element-out"])
        .arg(&elem)
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let p = json(&out);
    assert_eq!(p["certified"], Value::Bool(true));
    assert!((p["trace"]["re"].as_f64().unwrap() - 0.5).abs() <= 1e-8);
    assert_eq!(p["config"]["threads"].as_u64(), Some(2));

    let out = cli()
        .args(["verify", "--expected-trace", "0.5", "--element"])
        .arg(&elem)
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    for key in [
        "idempotency_residual",
        "selfadjoint_residual",
        "trace",
        "trace_error",
        "radius",
    ] {
        assert_eq!(v[key], p[key], "{key}");
    }
}

#[test]
fn verify_identity_and_halved_identity() {
    let dir = tempfile::tempdir().unwrap();
    let lat = Lattice2D::rotation(0.75).unwrap();
    let one = TwistedElement::identity(&lat, Side::Primal);
    let a = dir.path().join("one.json");
    let b = dir.path().join("half.json");
    std::fs::write(&a, one.to_json()).unwrap();
    std::fs::write(&b, one.scaled_re(0.5).to_json()).unwrap();
    cli().args(["verify", "--element"]).arg(&a).assert().code(0);
    let out = cli()
        .args(["verify", "--element"])
        .arg(&b)
        .assert()
        .code(2)
        .get_output()
        .stdout
        .clone();
    assert_eq!(json(&out)["idempotency_residual"].as_f64(), Some(0.25));
}

#[test]
fn verify_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("bad.json");
    std::fs::write(&a, "{\"lattice\": [").unwrap();
    cli().args(["verify", "--element"]).arg(&a).assert().code(1);
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    cli()
        .args(["sweep", "--thetas", "0.5,0.96,1.0", "--out"])
        .arg(&csv)
        .arg("--plot")
        .arg(&svg)
        .assert()
        .code(0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "theta,A,B,invertible,idem_residual,sa_residual,trace,error"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[2].split(',').nth(3) == Some("true"));
    assert!(lines[3].split(',').nth(3) == Some("false"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let run = || {
        cli()
            .args(["sweep", "--thetas", "0.5,0.75", "--bounds-only"])
            .assert()
            .code(0)
            .get_output()
            .stdout
            .clone()
    };
    assert_eq!(run(), run());
    let fb = || {
        cli()
            .args([
                "frame-bounds",
                "--window",
                "sech",
                "--lattice",
                "1,0,0,0.75",
            ])
            .assert()
            .get_output()
            .stdout
            .clone()
    };
    assert_eq!(fb(), fb());
}

#[test]
fn figa_gaussian_quartet_passes() {
    let out = cli()
        .args([
            "figa",
            "--windows",
            "gaussian;gaussian;sech;gaussian",
            "--lattice",
            "1,0,0,0.75",
        ])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() <= 1e-5);
    assert_eq!(v["config"]["grid"], "16,64");
    cli()
        .args(["figa", "--windows", "gaussian;sech"])
        .assert()
        .code(1);
}

#[test]
fn decay_of_gaussian_projection_is_superpolynomial() {
    let out = cli()
        .args(["decay", "--lattice", "1,0,0,0.5"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert_eq!(v["decay_fits"]["time"]["class"], "superpolynomial");
    assert_eq!(v["decay_fits"]["frequency"]["class"], "superpolynomial");
    assert_eq!(v["radius"].as_f64(), Some(12.0));
}

#[test]
fn exp2_projection_reports_polynomial_frequency_decay() {
    let out = cli()
        .args([
            "project",
            "--window",
            "exp2",
            "--lattice",
            "1,0,0,0.5",
            "--table-radius",
            "12",
        ])
        .assert()
        .get_output()
        .clone();
    let v = json(&out.stdout);
    assert_eq!(v["decay_fits"]["frequency"]["class"], "polynomial");
    let certified = v["certified"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if certified { 0 } else { 2 }));
}

#[test]
fn tensor_project_two_blocks() {
    let out = cli()
        .args(["tensor-project", "--lattice", "1,0,0,0.5;1,0,0,0.8"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert!((v["trace"]["re"].as_f64().unwrap() - 0.4).abs() <= 1e-7);
    cli()
        .args(["tensor-project", "--lattice", "1,0,0,0.5;1,0,0,1"])
        .assert()
        .code(2);
}

#[test]
fn tight_and_dual_atoms() {
    let out = cli()
        .args(["tight", "--lattice", "1,0,0,0.5", "--grid", "8,8"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert!((v["norm_sqr"].as_f64().unwrap() - 0.5).abs() <= 1e-8);
    assert!(v["frame"]["tightness"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["samples"]["t"].as_array().unwrap().len(), 128);
    let out = cli()
        .args(["dual", "--window", "sech", "--lattice", "1,0,0,0.75"])
        .assert()
        .code(0)
        .get_output()
        .stdout
        .clone();
    let v = json(&out);
    assert_eq!(v["kind"], "dual");
    assert!(v["expansion"]["coeffs"].as_array().unwrap().len() > 1);
    cli()
        .args(["tight", "--lattice", "1,0,0,1"])
        .assert()
        .code(2);
}

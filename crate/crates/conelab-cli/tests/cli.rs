//! Exit-code contract of the `cones` binary: 0 success, 2 configuration,
//! 3 scale floor, 4 I/O.

use std::process::Command;

fn cones(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cones"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn estimate_succeeds_on_catalog_set() {
    let out = cones(&[
        "estimate",
        "--catalog",
        "circle",
        "--point",
        "1,0",
        "--kinds",
        "upper-tangent",
        "--grid-count",
        "90",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"kind\": \"upper-tangent\""));
}

#[test]
fn unknown_catalog_exits_2() {
    let out = cones(&["estimate", "--catalog", "nonexistent", "--point", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_group_exits_2() {
    let out = cones(&["liegroup", "--group", "nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_csv_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.csv");
    std::fs::write(&path, "0.0,0.0\nnot-a-number,1.0\n").unwrap();
    let out = cones(&[
        "estimate",
        "--input",
        path.to_str().unwrap(),
        "--delta",
        "0.1",
        "--point",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_exits_4() {
    let out = cones(&[
        "estimate",
        "--input",
        "/nonexistent/points.csv",
        "--delta",
        "0.1",
        "--point",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn scale_floor_violation_exits_3() {
    // circle at δ = 1e-5 needs λ_min ≥ 8e-5; λ0 = 1e-4 with K = 10 ends far
    // below that, so the run must abort before any estimation.
    let out = cones(&[
        "estimate",
        "--catalog",
        "circle",
        "--point",
        "1,0",
        "--lambda0",
        "1e-4",
        "--count",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

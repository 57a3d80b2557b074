//! Binary-level behavior: worked examples, exit codes, config layering.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_regionops"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regionops-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_names_every_check_and_exits_zero() {
    let out = bin().args(["--dim", "32", "verify"]).output().unwrap();
    assert!(
        out.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    for name in [
        "whole-plane-identity",
        "segment-closed-form",
        "segment-eigenvectors",
        "line-projector",
        "rectangle-symbol",
        "displacement-isospectrality",
        "disk-spectrum",
        "hexagon-assembly",
        "map-duality",
        "dilation-equivalence",
        "step-matrix-sums",
        "eigenvalue-update",
        "diagonal-transfer",
        "majorization-squeezing",
        "trace-area-rule",
        "tooling-roundtrip",
    ] {
        assert!(
            stdout.contains(&format!("PASS {name}")),
            "missing PASS line for {name}:\n{stdout}"
        );
    }
    assert!(stdout.contains("all 16 checks passed"), "{stdout}");
}

#[test]
fn unit_disk_bounds_match_the_closed_form() {
    let dir = scratch("bounds");
    let out = bin()
        .args(["--dim", "48", "--expr", "disk(0,0,2)", "bounds"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    // largest mass of the unit-radius disk is 1 - 1/e = 0.63212...
    assert!(stdout.contains("lambda_max = 0.63212"), "{stdout}");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn tile_reports_quadrupling_areas() {
    let dir = scratch("tile");
    let out = bin()
        .args(["--dim", "16", "--expr", "rect(0,0,1,1)", "--steps", "2", "tile"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for line in ["step 0: area = 1", "step 1: area = 4", "step 2: area = 16"] {
        assert!(stdout.contains(line), "{stdout}");
    }
    let records = fs::read_to_string(dir.join("tile-records.csv")).unwrap();
    assert_eq!(records.lines().count(), 4, "header plus three records");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_separate_usage_numeric_and_verification() {
    // malformed expression -> usage (1), reported at line:column
    let out = bin()
        .args(["--expr", "rect(0,0,1,)", "eval"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("1:12"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // invalid truncation dimension -> usage (1)
    let out = bin().args(["--dim", "1", "--expr", "point", "eval"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // missing expression -> usage (1)
    let out = bin().arg("eval").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // unknown flag -> usage (1)
    let out = bin().args(["--bogus", "eval"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // a line is not a tiling seed -> numerical precondition (2)
    let dir = scratch("codes");
    let out = bin()
        .args(["--dim", "16", "--expr", "line(0,0)", "tile"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = scratch("config");
    let cfg_path = dir.join("run.toml");
    fs::write(
        &cfg_path,
        "dim = 12\nexpr = \"rect(0,0,1,1)\"\nquad_order = 32\n",
    )
    .unwrap();
    let out = bin()
        .arg("--config")
        .arg(&cfg_path)
        .arg("eval")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stdout).contains("dim 12"),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = bin()
        .arg("--config")
        .arg(&cfg_path)
        .args(["--dim", "16", "eval"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stdout).contains("dim 16"),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    // unknown config keys are configuration errors
    fs::write(&cfg_path, "dim = 12\nbogus = true\n").unwrap();
    let out = bin().arg("--config").arg(&cfg_path).arg("verify").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn build_caches_by_content_hash() {
    let dir = scratch("cache");
    let args = ["--dim", "16", "--expr", "disk(0,0,1)", "build"];
    let first = bin().args(args).arg("--out").arg(&dir).output().unwrap();
    assert!(first.status.success());
    assert!(String::from_utf8_lossy(&first.stdout).contains("built "));
    let second = bin().args(args).arg("--out").arg(&dir).output().unwrap();
    assert!(second.status.success());
    assert!(
        String::from_utf8_lossy(&second.stdout).contains("cache hit"),
        "{}",
        String::from_utf8_lossy(&second.stdout)
    );
    fs::remove_dir_all(&dir).ok();
}

//! End-to-end checks of the installed binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diracwmc"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("diracwmc-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("DIRACWMC_COMPONENT_CAP").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn value_prints_the_outer_product() {
    let f = write_temp("outer.dirac", "ket(0,2)*bra(1,2)\n");
    let out = run(&["value", f.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[0, 1]\n[0, 0]\n");
}

#[test]
fn let_bindings_splice_into_the_expression() {
    let f = write_temp(
        "lets.dirac",
        "# two named matrices\nlet M1 = ket(0,3)*bra(1,3);\nlet M2 = ket(2,3)*bra(0,3);\n3.3*M1 + M2\n",
    );
    let out = run(&["value", f.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "[0, 3.3, 0]\n[0, 0, 0]\n[1, 0, 0]\n");

    let out = run(&["typecheck", f.to_str().unwrap()]);
    assert_eq!(stdout(&out), "matrix(3, 1 -> 1)\n");
}

#[test]
fn count_agrees_with_exported_count() {
    let f = write_temp("trace.dirac", "tr((ket(0,2) + ket(1,2)) * (bra(0,2) + bra(1,2)))\n");
    let direct = run(&["count", f.to_str().unwrap()]);
    assert!(direct.status.success());

    let compiled = run(&["compile", f.to_str().unwrap()]);
    assert!(compiled.status.success());
    let wcnf = write_temp("trace.wcnf", &stdout(&compiled));
    let via_file = run(&["count", wcnf.to_str().unwrap()]);
    assert!(via_file.status.success());
    assert_eq!(stdout(&direct), stdout(&via_file));
    assert_eq!(stdout(&direct), "2\n");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let f = write_temp(
        "det.model",
        "potts\nq 3\nJ 4\nsite a\nsite b\nsite c\nedge a b\nedge b c\n",
    );
    let once = run(&["partition", f.to_str().unwrap(), "--beta", "1"]);
    let twice = run(&["partition", f.to_str().unwrap(), "--beta", "1"]);
    assert!(once.status.success());
    assert_eq!(once.stdout, twice.stdout);
    assert_eq!(stdout(&once), "Z = 9610.05\nF = -9.17056\n");
}

#[test]
fn tfim_partition_matches_the_reference_value() {
    let f = write_temp(
        "tfim.model",
        "tfim\nsite a\nsite b\ncoupling a b 1.0\nmu_x 1.0\nmu_z 0\n",
    );
    let out = run(&["partition", f.to_str().unwrap(), "--beta", "1", "--trotter-k", "64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let z: f64 = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("Z = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((z - 12.55).abs() / 12.55 < 0.02, "Z = {z}");
}

#[test]
fn full_precision_prints_seventeen_digits() {
    let f = write_temp("third.dirac", "tr(0.333333333333333314*(ket(0,2)*bra(0,2)))\n");
    let out = run(&["value", "--full-precision", f.to_str().unwrap()]);
    assert_eq!(stdout(&out), "0.33333333333333331\n");
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    // Usage: missing required flag.
    let f = write_temp("e.model", "ising\nsite a\n");
    let out = run(&["partition", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // Input: type error.
    let bad = write_temp("bad.dirac", "ket(0,2)*ket(0,2)\n");
    let out = run(&["typecheck", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Counting: component cap exceeded.
    let wide = write_temp(
        "wide.dirac",
        "tr((ket(0,2)*bra(0,2)) kron (ket(0,2)*bra(0,2)) kron (ket(0,2)*bra(0,2)))\n",
    );
    let out = bin()
        .args(["count", wide.to_str().unwrap(), "--component-cap", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // The environment variable is the fallback for the same knob.
    let out = bin()
        .args(["count", wide.to_str().unwrap()])
        .env("DIRACWMC_COMPONENT_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = bin()
        .args(["count", wide.to_str().unwrap(), "--component-cap", "none"])
        .env("DIRACWMC_COMPONENT_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reports_a_pass() {
    let f = write_temp("v.dirac", "(3*(ket(0,2)*bra(1,2))) kron ket(0,2)\n");
    for enc in ["log", "order", "onehot"] {
        let out = run(&["verify", f.to_str().unwrap(), "--encoding", enc]);
        assert!(out.status.success(), "encoding {enc}");
        assert!(stdout(&out).ends_with("PASS\n"));
    }
}

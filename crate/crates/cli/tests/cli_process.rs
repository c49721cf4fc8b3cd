//! Exit-code contract and output-shape checks against the real binary.

use std::process::Command;

fn wpsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wpsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn success_paths_exit_zero() {
    for args in [
        vec!["report"],
        vec!["sweep", "--steps", "5"],
        vec!["sample", "--shots", "100", "--seed", "1"],
        vec!["check"],
    ] {
        let out = wpsim(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {out:?}");
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["sweep", "--steps", "1"],
        vec!["sample", "--shots", "0", "--seed", "1"],
        vec!["sample", "--shots", "10"], // missing required seed
        vec!["report", "--no-such-flag"],
        vec!["compile", "--circuit", "/nonexistent.circuit"],
        vec![],
    ] {
        let out = wpsim(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {out:?}");
    }
}

#[test]
fn tolerance_failures_exit_two() {
    let out = wpsim(&["check", "--perturb-sigma", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("FAIL unitarity"), "{stdout}");
    assert!(stdout.lines().filter(|l| l.starts_with("PASS ")).count() >= 5);

    // an impossible tolerance trips the report identity checks
    let out = wpsim(&["report", "--tolerance", "1e-30"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    for args in [vec!["--help"], vec!["--version"], vec!["report", "--help"]] {
        let out = wpsim(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn report_csv_shape() {
    let out = wpsim(&["report", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("quantity,re,im"));
    // 8 projector rows + 2 sums + 1 probability
    assert_eq!(lines.count(), 11);
}

#[test]
fn compile_roundtrip_is_stable() {
    let dir = std::env::temp_dir();
    let first = dir.join("wpsim_canonical_1.circuit");
    let second = dir.join("wpsim_canonical_2.circuit");
    let bundled = concat!(env!("CARGO_MANIFEST_DIR"), "/circuits/toolbox.circuit");
    let out = wpsim(&["compile", "--circuit", bundled, "--out", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = wpsim(&[
        "compile",
        "--circuit",
        first.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

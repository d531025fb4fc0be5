//! End-to-end checks of the `ura` binary: exit codes, output contracts and
//! byte-identity across re-runs and thread counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ura(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ura"))
        .args(args)
        .output()
        .expect("spawn ura")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(ura(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(ura(&[]).status.code(), Some(1));
    assert_eq!(ura(&["pupe", "--trials"]).status.code(), Some(1));
    // Help and version are not errors.
    assert_eq!(ura(&["--help"]).status.code(), Some(0));
    assert_eq!(ura(&["--version"]).status.code(), Some(0));
}

#[test]
fn validation_errors_exit_2() {
    // No grid and no target.
    let out = ura(&["pupe", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // Invalid config field value.
    let out = ura(&["pupe", "--ebn0-db", "6", "--set", "m=0", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown config key.
    let out = ura(&["pupe", "--ebn0-db", "6", "--set", "bogus=1", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bogus"), "stderr: {msg}");
    // Detector sweep with a non-power-of-two pilot length.
    let out = ura(&["detector-curve", "--pilot-len", "12", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_negative_control_fails() {
    let out = ura(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
    assert!(text.contains("measured") && text.contains("tolerance"));

    let out = ura(&["selftest", "--corrupt-crc"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
}

#[test]
fn detector_curve_analytics_only_and_determinism() {
    let a = tmp("det_a.csv");
    let b = tmp("det_b.csv");
    let common = [
        "detector-curve",
        "--antennas",
        "8",
        "--pilot-len",
        "16",
        "--points",
        "3",
        "--trials",
        "300",
        "--seed",
        "9",
    ];
    let mut run_a: Vec<&str> = common.to_vec();
    run_a.extend(["--threads", "1", "--out", a.to_str().unwrap()]);
    assert_eq!(ura(&run_a).status.code(), Some(0));
    let mut run_b: Vec<&str> = common.to_vec();
    run_b.extend(["--threads", "8", "--out", b.to_str().unwrap()]);
    assert_eq!(ura(&run_b).status.code(), Some(0));
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "thread count changed output");

    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("# manifest: "));
    assert!(text.contains("p_p,analytic_pd,simulated_pd,simulated_pf,trials"));
    assert_eq!(text.lines().count(), 2 + 3);

    // trials=0 emits analytic columns only.
    let out = ura(&[
        "detector-curve",
        "--antennas",
        "8",
        "--pilot-len",
        "16",
        "--points",
        "2",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().skip(2) {
        assert!(line.ends_with(",,,0"), "line: {line}");
    }
}

#[test]
fn pupe_grid_row_count_and_determinism() {
    let a = tmp("pupe_a.csv");
    let b = tmp("pupe_b.csv");
    let common = [
        "pupe",
        "--set",
        "m=30",
        "--set",
        "k_a=2",
        "--ebn0-db",
        "4,8,12",
        "--trials",
        "8",
        "--seed",
        "5",
    ];
    let mut run_a: Vec<&str> = common.to_vec();
    run_a.extend(["--threads", "1", "--out", a.to_str().unwrap()]);
    assert_eq!(ura(&run_a).status.code(), Some(0));
    let mut run_b: Vec<&str> = common.to_vec();
    run_b.extend(["--threads", "8", "--out", b.to_str().unwrap()]);
    assert_eq!(ura(&run_b).status.code(), Some(0));
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "thread count changed output");

    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("# manifest: "));
    assert!(text.contains("k_a,ebn0_db,pe,p_md,p_fa,half_width,trials"));
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!(row.starts_with("2,"), "row: {row}");
        assert!(row.ends_with(",8"), "row: {row}");
    }
}

#[test]
fn pupe_config_file_and_ka_list() {
    let cfg = tmp("small.cfg");
    std::fs::write(&cfg, "m = 30\nk_a = 1\n# comment\nlist_size = 16\n").unwrap();
    let out = ura(&[
        "pupe",
        "--config",
        cfg.to_str().unwrap(),
        "--ka-list",
        "1,2",
        "--ebn0-db",
        "10",
        "--trials",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1,") && rows[1].starts_with("2,"));

    // Malformed config file.
    let bad = tmp("bad.cfg");
    std::fs::write(&bad, "not a pair\n").unwrap();
    let out = ura(&["pupe", "--config", bad.to_str().unwrap(), "--ebn0-db", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pupe_search_mode_single_row() {
    let out = ura(&[
        "pupe",
        "--set",
        "m=30",
        "--set",
        "k_a=1",
        "--target-pe",
        "0.5",
        "--loose",
        "--search-lo",
        "6",
        "--search-hi",
        "12",
        "--trials",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("1,"), "row: {}", rows[0]);
}

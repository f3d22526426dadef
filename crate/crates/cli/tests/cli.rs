use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sortnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sortnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn search_prints_sizes() {
    for (n, s) in [(1, 0), (2, 1), (5, 9)] {
        let out = sortnet(&["search", &n.to_string()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out), format!("s({n}) = {s}"));
    }
}

#[test]
fn unsupported_arguments_are_usage_errors() {
    assert_eq!(sortnet(&["search", "13"]).status.code(), Some(2));
    assert_eq!(sortnet(&["search", "0"]).status.code(), Some(2));
    assert_eq!(sortnet(&["oracle", "7"]).status.code(), Some(2));
    assert_eq!(sortnet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        sortnet(&["bound", "--from", "9", "--to", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sortnet(&["search", "4", "--threads", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn oracle_and_bound() {
    let out = sortnet(&["oracle", "6"]);
    assert_eq!(stdout(&out), "s(6) = 12");
    let out = sortnet(&["bound", "--from", "11=35", "--to", "12"]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(0), "39".to_string())
    );
}

#[test]
fn certificate_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    let cert = dir.path().join("cert5.snb1");
    assert_eq!(
        sortnet(&["search", "5", "--dump", path(&dump)])
            .status
            .code(),
        Some(0)
    );
    let out = sortnet(&["gen-cert", "--dump", path(&dump), "--out", path(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with(" steps"));
    let out = sortnet(&["check-cert", path(&cert)]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(0), "5 9".to_string())
    );

    let mut bytes = fs::read(&cert).unwrap();
    let tampered = dir.path().join("tampered.snb1");
    let bound_offset = 14 + 2 + 4;
    bytes[bound_offset] = bytes[bound_offset].wrapping_add(5);
    fs::write(&tampered, &bytes).unwrap();
    let out = sortnet(&["check-cert", path(&tampered)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("rejected: bad-"));

    let truncated = dir.path().join("truncated.snb1");
    fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(
        sortnet(&["check-cert", path(&truncated)]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_manifest_is_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = sortnet(&[
        "gen-cert",
        "--dump",
        path(dir.path()),
        "--out",
        path(&dir.path().join("c.snb1")),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_network() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("three.net");
    fs::write(&good, "width 3\n# standard form\nc 0 2\nc 1 2\nc 0 1\n").unwrap();
    let out = sortnet(&["verify-network", path(&good)]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(0), "SORTS".to_string())
    );
    let bad = dir.path().join("bad.net");
    fs::write(&bad, "width 3\nc 0 1\nc 1 2\n").unwrap();
    let out = sortnet(&["verify-network", path(&bad)]);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(1), "NOT-SORTING".to_string())
    );
    let garbage = dir.path().join("garbage.net");
    fs::write(&garbage, "width x\n").unwrap();
    assert_eq!(
        sortnet(&["verify-network", path(&garbage)]).status.code(),
        Some(2)
    );
}

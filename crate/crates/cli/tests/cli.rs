use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn spalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spalign"))
        .args(args)
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn align_pair_reaches_fifty() {
    let out = spalign(&["align-pair", path(&fixture("fig1.json")), "--trace"]);
    let v = json_of(&out);
    assert_eq!(v["objective"], 50);
    assert_eq!(v["report"]["sum_m"], 125);
    let trace = String::from_utf8(out.stderr).unwrap();
    assert_eq!(trace.lines().count(), 8);
    assert!(trace.contains("T <- u2_3 (15)"));
}

#[test]
fn metrics_without_alignment() {
    let v = json_of(&spalign(&["metrics", path(&fixture("fig1.json"))]));
    assert_eq!(v["d"], 7);
    assert_eq!(v["dw_S_T"], 110);
    assert_eq!(v["dw_T_S"], 107);
}

#[test]
fn metrics_of_emitted_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let status = spalign(&[
        "align-multi",
        path(&fixture("fig1.json")),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let v = json_of(&spalign(&[
        "metrics",
        path(&fixture("fig1.json")),
        "--alignment",
        out.to_str().unwrap(),
    ]));
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["objective"], stored["objective"]);
}

#[test]
fn align_1d_on_path_fixture() {
    let v = json_of(&spalign(&["align-1d", path(&fixture("fig2.json"))]));
    let costs: Vec<u64> = v["separators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["cost"].as_u64().unwrap())
        .collect();
    assert_eq!(costs, vec![1, 2]);
    assert_eq!(v["summed_cost"], 3);
}

#[test]
fn oracle_modes() {
    let v = json_of(&spalign(&[
        "oracle",
        path(&fixture("fig1.json")),
        "--mode",
        "restricted",
    ]));
    assert_eq!(v["oracle"]["optimum"], 50);
    let bad = spalign(&["oracle", path(&fixture("fig1.json")), "--mode", "sideways"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn gadget_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert!(
        spalign(&["gen-gadget", "--x", "3,5,7", "--out", g.to_str().unwrap()])
            .status
            .success()
    );
    let v = json_of(&spalign(&["oracle", g.to_str().unwrap()]));
    // S = 15, best split 7 | 8, optimum (15 + 1) / 2.
    assert_eq!(v["oracle"]["optimum"], 8);
    let v = json_of(&spalign(&["verify-gadget", "--x", "1,2,3", "--delta", "0"]));
    assert_eq!(v["consistent"], true);
    let odd = spalign(&["verify-gadget", "--x", "1,2,3", "--delta", "1"]);
    assert_eq!(odd.status.code(), Some(2));
}

#[test]
fn gen_random_is_deterministic() {
    let args = [
        "gen-random",
        "--seed",
        "42",
        "--width",
        "4",
        "--height",
        "4",
        "--k",
        "2",
        "--m",
        "4",
    ];
    let a = spalign(&args);
    let b = spalign(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fig1.svg");
    let out = spalign(&[
        "render",
        path(&fixture("fig1.json")),
        "--alignment",
        path(&fixture("fig1_alignment.json")),
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<circle").count(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(spalign(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(spalign(&["--help"]).status.code(), Some(0));
    assert_eq!(
        spalign(&["align-pair", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        spalign(&["align-1d", path(&fixture("fig1.json"))])
            .status
            .code(),
        Some(2)
    );
}

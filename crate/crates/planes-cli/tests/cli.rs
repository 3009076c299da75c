//! End-to-end tests of the command line against the shipped fixtures.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planes"))
        .args(args)
        .output()
        .expect("spawn planes")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Regenerates the fixtures when REGEN_FIXTURES is set, otherwise checks
/// that they are byte-identical to what the current code produces.
#[test]
fn fixtures_are_in_sync() {
    let fresh = [
        (
            "figure1.txt",
            stdout_of(&run(&["gadget", "superstab", "--emit-table"])),
        ),
        (
            "fano.json",
            planes::json::plane_to_json(&planes::catalog::fano()),
        ),
        (
            "pi4.json",
            planes::json::plane_to_json(&planes::completion::pi_base(4).unwrap()),
        ),
    ];
    for (name, text) in fresh {
        let path = fixture(name);
        if std::env::var_os("REGEN_FIXTURES").is_some() {
            std::fs::write(&path, &text).unwrap();
        } else {
            let shipped = std::fs::read_to_string(&path).unwrap();
            assert_eq!(shipped, text, "fixture {name} is stale; rerun with REGEN_FIXTURES=1");
        }
    }
}

#[test]
fn validate_reports_sizes() {
    let out = run(&["validate", fixture("fano.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "7 points, 7 lines, 21 incidences\n");
}

#[test]
fn check_open_uses_exit_codes() {
    let closed = run(&["check-open", fixture("fano.json").to_str().unwrap()]);
    assert_eq!(exit_code(&closed), 1);
    let labels: Vec<String> = serde_json::from_str(&stdout_of(&closed)).unwrap();
    assert_eq!(labels.len(), 14);

    let open = run(&["check-open", fixture("pi4.json").to_str().unwrap()]);
    assert_eq!(exit_code(&open), 0);
    assert_eq!(stdout_of(&open), "");
}

#[test]
fn rank_prints_the_number() {
    let out = run(&["rank", fixture("pi4.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout_of(&out), "4\n");

    let closed = run(&["rank", fixture("fano.json").to_str().unwrap()]);
    assert_eq!(exit_code(&closed), 2);
}

#[test]
fn dual_roundtrips_canonically() {
    let once = run(&["dual", fixture("fano.json").to_str().unwrap()]);
    assert_eq!(exit_code(&once), 0);
    let mut second = Command::new(env!("CARGO_BIN_EXE_planes"))
        .args(["dual", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn planes");
    second
        .stdin
        .take()
        .unwrap()
        .write_all(&once.stdout)
        .unwrap();
    let twice = second.wait_with_output().unwrap();
    assert_eq!(exit_code(&twice), 0);
    let original = std::fs::read_to_string(fixture("fano.json")).unwrap();
    assert_eq!(stdout_of(&twice), original);
}

#[test]
fn complete_orders_digraphs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let staged = dir.path().join("staged.json");
    let out = run(&[
        "complete",
        fixture("pi4.json").to_str().unwrap(),
        "-k",
        "1",
        staged.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);

    let ordered = run(&["hf-order", staged.to_str().unwrap()]);
    assert_eq!(exit_code(&ordered), 0);
    let ordering = dir.path().join("ordering.json");
    std::fs::write(&ordering, stdout_of(&ordered)).unwrap();

    let dig = run(&[
        "digraph",
        staged.to_str().unwrap(),
        ordering.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&dig), 0);
    let digraph = dir.path().join("digraph.json");
    std::fs::write(&digraph, stdout_of(&dig)).unwrap();

    let compat = run(&["compat", digraph.to_str().unwrap()]);
    assert_eq!(exit_code(&compat), 0);

    let closure = run(&["closure", digraph.to_str().unwrap(), "--set", "p1∨q1"]);
    assert_eq!(exit_code(&closure), 0);
    let labels: Vec<String> = serde_json::from_str(&stdout_of(&closure)).unwrap();
    assert!(labels.contains(&"p1∨q1".to_string()));
    let again = run(&[
        "closure",
        digraph.to_str().unwrap(),
        "--set",
        &labels.join(","),
    ]);
    assert_eq!(exit_code(&again), 0);
    let relabels: Vec<String> = serde_json::from_str(&stdout_of(&again)).unwrap();
    assert_eq!(relabels, labels);
}

#[test]
fn hf_order_respects_bases() {
    let out = run(&[
        "hf-order",
        fixture("pi4.json").to_str().unwrap(),
        "--base",
        "l,p1,p2",
    ]);
    assert_eq!(exit_code(&out), 0);
    let fano = run(&["hf-order", fixture("fano.json").to_str().unwrap()]);
    assert_eq!(exit_code(&fano), 1);
    assert_eq!(stdout_of(&fano), "");
}

#[test]
fn amalgam_glues_two_copies() {
    let pi4 = fixture("pi4.json");
    let out = run(&[
        "amalgam",
        pi4.to_str().unwrap(),
        pi4.to_str().unwrap(),
        "--shared",
        "l,p1,p2",
    ]);
    assert_eq!(exit_code(&out), 0);
    let plane = planes::json::plane_from_json(&stdout_of(&out)).unwrap();
    assert_eq!(plane.n_points(), 6);
    assert_eq!(plane.n_lines(), 1);
    assert!(plane.by_label("q1'").is_some());
}

#[test]
fn iso_reports_pinned_matches() {
    let dir = tempfile::tempdir().unwrap();
    let pins = dir.path().join("pins.json");
    std::fs::write(&pins, "{\"q1\":\"q2\",\"q2\":\"q1\"}").unwrap();
    let pi4 = fixture("pi4.json");
    let out = run(&[
        "iso",
        pi4.to_str().unwrap(),
        pi4.to_str().unwrap(),
        "--pin",
        pins.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["isomorphic"], true);

    let negative = run(&[
        "iso",
        pi4.to_str().unwrap(),
        fixture("fano.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&negative), 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&negative)).unwrap();
    assert_eq!(doc["isomorphic"], false);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(exit_code(&run(&["rank", "no-such-file.json"])), 2);
    assert_eq!(exit_code(&run(&["gadget", "chain", "--eta", "012"])), 2);
    assert_eq!(exit_code(&run(&["gadget", "tree", "-d", "2", "--emit-table"])), 2);
    assert_eq!(exit_code(&run(&["frobnicate"])), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_planes"))
        .args(["complete", fixture("pi4.json").to_str().unwrap(), "-k", "9"])
        .env("PLANES_BUDGET", "50")
        .output()
        .expect("spawn planes");
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("budget"), "unexpected stderr: {err}");
}

#[test]
fn gadget_documents_parse_back() {
    let out = run(&["gadget", "chain", "--eta", "10"]);
    assert_eq!(exit_code(&out), 0);
    let plane = planes::json::plane_or_staged_from_json(&stdout_of(&out)).unwrap();
    assert_eq!(plane.n_elements(), 57);

    let tree = run(&["gadget", "tree", "-d", "3"]);
    assert_eq!(exit_code(&tree), 0);
    let d = planes::json::digraph_from_json(&stdout_of(&tree)).unwrap();
    assert_eq!(d.plane().n_elements(), 15);
}

use std::path::Path;
use std::process::{Command, Output};

use arrvol::constructions::gen_cfk;
use arrvol::search::verify_search_json;
use arrvol::spectrum::{volume_spectrum, SpectrumConfig};
use serde_json::Value;

fn arrvol(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrvol"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV reports open with a config comment; the rest is the report proper.
fn body(o: &Output) -> String {
    let text = stdout(o);
    assert!(text.starts_with("# config {"), "{text}");
    text.split_once('\n').unwrap().1.to_string()
}

#[test]
fn gen_then_analyze_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let gen = arrvol(&["gen", "cfk", "--d", "3", "--n", "2", "-o", "a.json"], dir.path());
    assert!(gen.status.success());
    let file: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(file["provenance"]["generator"]["cfk"]["d"], 3);
    assert_eq!(file["hyperplanes"].as_array().unwrap().len(), 18);

    let out = arrvol(&["analyze", "spectrum", "a.json"], dir.path());
    assert!(out.status.success());
    let report = body(&out);
    let expected = volume_spectrum(&gen_cfk(3, 2).unwrap(), &SpectrumConfig::default()).to_csv();
    assert_eq!(report, expected);
    let first = report.lines().nth(1).unwrap();
    let multiplicity: u64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!(first.starts_with("1/6,") && multiplicity >= 48);
}

#[test]
fn kobon_table_has_tamura_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = arrvol(&["bounds", "kobon", "--n", "7"], dir.path());
    assert!(out.status.success());
    assert!(body(&out).lines().any(|l| l.starts_with("tamura,11,")));
}

#[test]
fn kobon_with_input_reports_empirical_row() {
    let dir = tempfile::tempdir().unwrap();
    assert!(arrvol(&["gen", "ngon", "--n", "6", "-o", "g.json"], dir.path()).status.success());
    let out = arrvol(&["bounds", "kobon", "--n", "6", "--input", "g.json", "--format", "json"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["within_bounds"], true);
    assert!(v["bounds"]["values"].as_array().unwrap().iter().any(|r| r["name"] == "empirical"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["gen", "cfk", "--d", "2"],
        &["analyze", "spectrum", "missing.json"],
        &["gen", "ngon", "--n", "5", "--field", "rational"],
        &["bounds", "rk", "--n", "5", "--k", "2"],
        &["verify-paper", "--suite", "99"],
    ] {
        let out = arrvol(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_paper_exit_code_tracks_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let pass = arrvol(&["verify-paper", "--suite", "1,8"], dir.path());
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(body(&pass).lines().filter(|l| l.contains(",PASS,")).count(), 2);
    let fail = arrvol(&["verify-paper", "--suite", "10"], dir.path());
    assert_eq!(fail.status.code(), Some(1));
    assert!(body(&fail).contains(",FAIL,"));
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert!(arrvol(&["gen", "ngon", "--n", "8", "-o", "g.json"], dir.path()).status.success());
    for cmd in [&["analyze", "spectrum", "g.json"][..], &["analyze", "cells", "g.json", "--format", "csv"]] {
        let one = arrvol(&[cmd, &["--threads", "1"]].concat(), dir.path());
        let three = arrvol(&[cmd, &["--threads", "3"]].concat(), dir.path());
        assert!(one.status.success() && three.status.success());
        assert_eq!(body(&one), body(&three));
    }
}

#[test]
fn badge_result_reverifies_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = arrvol(
        &["search", "badge", "--m", "5", "--target", "2", "--restarts", "2", "--max-evals", "3000", "-o", "b.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["success"], true);
    assert_eq!(v["run_config"]["global"]["seed"], 0);
    assert_eq!(v["config"]["restarts"], 2);
    let score = verify_search_json(&text, 1e-6).unwrap();
    assert_eq!(score.ties as u64, v["score"]["ties"].as_u64().unwrap());

    let cells = arrvol(&["analyze", "cells", "b.json"], dir.path());
    assert!(cells.status.success());
}

#[test]
fn float_conversion_of_rational_input() {
    let dir = tempfile::tempdir().unwrap();
    assert!(arrvol(&["gen", "cfk", "--d", "2", "--n", "1", "-o", "c.json"], dir.path()).status.success());
    let out = arrvol(&["analyze", "spectrum", "c.json", "--field", "float", "--format", "json"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["spectrum"]["degenerate_count"], 8);
    assert_eq!(v["run_config"]["global"]["field"], "float");
}

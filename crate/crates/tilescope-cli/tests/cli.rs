use std::process::{Command, Output};

use serde_json::Value;

fn tilescope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilescope")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_decimal() {
    let o = tilescope(&["count", "--variant", "s", "--n", "2", "--a", "0", "--b", "1", "--k", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "6272");
    let o = tilescope(&["count", "--method", "evenodd", "--variant", "s", "--n", "2", "--a", "0", "--b", "1", "--k", "1"]);
    assert_eq!(stdout(&o).trim(), "6272");
}

#[test]
fn count_reads_spec_files() {
    let path = std::env::temp_dir().join(format!("tilescope-cli-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"variant": "hexagon", "params": {"p": 2, "q": 3, "r": 4}}"#).unwrap();
    let o = tilescope(&["count", "--spec-file", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "490");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn formula_output_is_labelled_json() {
    let o = tilescope(&["count", "--method", "formula", "--formula", "conjectured", "--args", "4,2,1,1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "conjectured");
    assert_eq!(v["formula_id"], "conjectured");
    assert!(v["value"].is_string());
    let o = tilescope(&["count", "--method", "formula", "--formula", "mr", "--variant", "s", "--n", "4", "--a", "2", "--b", "1", "--k", "1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "proved");
    let inv = tilescope(&["count", "--invariant", "--cell-cap", "400", "--variant", "s", "--n", "4", "--a", "2", "--b", "1", "--k", "1"]);
    assert_eq!(stdout(&inv).trim(), v["value"].as_str().unwrap());
}

#[test]
fn verify_exit_codes() {
    let ok = tilescope(&["verify", "--suite", "oracle-vs-evenodd", "-r", "n=2", "-r", "k=1", "-r", "a=0"]);
    assert_eq!(ok.status.code(), Some(0));
    let capped = tilescope(&["verify", "--suite", "macmahon", "--cell-cap", "20", "-r", "p=3", "-r", "q=3", "-r", "r=3"]);
    assert_eq!(capped.status.code(), Some(3));
    let empty = tilescope(&["verify", "--suite", "macmahon", "-r", "p=2..1", "--format", "csv", "--no-timing"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty).trim(), "suite,agree,status");
    let bad = tilescope(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_reports_are_reproducible() {
    let args = ["verify", "--suite", "oracle-vs-evenodd", "--no-timing", "--format", "csv"];
    let one = tilescope(&[&args[..], &["--jobs", "1"]].concat());
    let four = tilescope(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn interp_matches_closed_form() {
    let o = tilescope(&["interp", "--n", "1", "--b", "2", "--k", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["degree"], 15);
}

#[test]
fn asymptotics_outputs() {
    let o = tilescope(&["asymptotics", "--what", "convergence", "--a", "0", "--b", "2", "--format", "csv", "--digits", "20"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,value,ratio"));
    assert_eq!(lines.count(), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_tilescope"))
        .args(["asymptotics", "--what", "hole", "--hole", "triangle:2"])
        .env("TILESCOPE_PRECISION", "30")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let digits = v["value"].as_str().unwrap().split('e').next().unwrap().replace('.', "");
    assert_eq!(digits.len(), 30);
    let o = tilescope(&["asymptotics", "--what", "calibration"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["hartwig"].as_str().unwrap().starts_with("2.080"));
}

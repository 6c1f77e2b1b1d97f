use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relay-secrecy")).args(args).output().expect("binary runs")
}

#[test]
fn empty_range_has_one_row_per_combination() {
    let out = run(&["sweep", "--from-db", "10", "--to-db", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("series,axis,axis_value_db,scheme,csi,metric,method,closed_form_value"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = ["sweep", "--preset", "fig5", "--mc-trials", "3000", "--seed", "9"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(args);
    assert_eq!(a.stdout, run(&threaded).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sweep", "--preset", "fig9"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--step-db", "0"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--bogus"]).status.code(), Some(2));
    let fail = run(&["validate", "--grid-size", "1", "--mc-trials", "1000", "--quad-abs", "0", "--mc-sigmas", "0", "--mc-abs", "0"]);
    assert_eq!(fail.status.code(), Some(4));
    assert!(String::from_utf8(fail.stdout).unwrap().contains("FAIL"));
    assert_eq!(run(&["sweep", "--preset", "fig4", "--check"]).status.code(), Some(0));
}

#[test]
fn sc_sc_asymptote_is_a_row_note() {
    let out = run(&["sweep", "--from-db", "20", "--to-db", "20", "--scheme", "SC-SC", "--metric", "SOP", "--asymptote"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("no tabulated asymptote")));
}

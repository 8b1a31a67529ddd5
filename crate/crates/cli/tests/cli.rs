//! End-to-end checks of the command-line surface: worked-example values,
//! exit codes, determinism, and the match/eval round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pdiag")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn pdiag")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pdiag-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const ALPHA_L1: &str =
    r#"{"space":"halfplane:l1","points":[{"pt":[0,1],"mult":1},{"pt":[0,10],"mult":2}]}"#;
const BETA_L1: &str =
    r#"{"space":"halfplane:l1","points":[{"pt":[10,11],"mult":1},{"pt":[0,11],"mult":2}]}"#;

#[test]
fn dist_reports_the_worked_example() {
    let dir = tempdir("dist");
    let a = write_file(&dir, "a.json", ALPHA_L1);
    let b = write_file(&dir, "b.json", BETA_L1);
    let out = run(&["dist", "--space", "halfplane:l1", "--p", "2",
                    a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], serde_json::json!(2.0));
    assert_eq!(v["optimal"], serde_json::json!(true));

    let out = run(&["dist", "--space", "halfplane:l1", "--p", "1",
                    a.to_str().unwrap(), b.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], serde_json::json!(4.0));

    // distance of a diagram to itself
    let out = run(&["dist", "--space", "halfplane:l1", "--p", "2",
                    a.to_str().unwrap(), a.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], serde_json::json!(0.0));
}

#[test]
fn match_output_feeds_back_to_the_same_value() {
    let dir = tempdir("roundtrip");
    let a = write_file(&dir, "a.json", ALPHA_L1);
    let b = write_file(&dir, "b.json", BETA_L1);
    let solved = run(&["match", "--space", "halfplane:l1", "--p", "2",
                       a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(solved.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
    let dist_value = v["value"].to_string();
    let m = write_file(&dir, "m.json", &v["matching"].to_string());
    let eval = run(&["match", "--space", "halfplane:l1", "--p", "2",
                     "--eval", m.to_str().unwrap(),
                     a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(eval.status.success());
    let ev: serde_json::Value = serde_json::from_str(&stdout(&eval)).unwrap();
    // bit-identical value text through the round trip
    assert_eq!(ev["value"].to_string(), dist_value);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempdir("determinism");
    let a = write_file(&dir, "a.json", ALPHA_L1);
    let b = write_file(&dir, "b.json", BETA_L1);
    for args in [
        vec!["match", "--space", "halfplane:l1", "--p", "1.5",
             a.to_str().unwrap(), b.to_str().unwrap()],
        vec!["geodesic", "--space", "halfplane:l1", "--p", "2",
             "--t-grid", "0,0.25,0.5,0.75,1",
             a.to_str().unwrap(), b.to_str().unwrap()],
        vec!["diagnose", "--space", "halfplane:l1", "--p", "1",
             "--eps-schedule", "2,1,0.5", a.to_str().unwrap(), b.to_str().unwrap()],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn gallery_values() {
    let out = run(&["gallery", "--name", "wedge_intervals", "--n", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0], serde_json::json!([1, 2.0]));
    assert_eq!(v[1], serde_json::json!([2, 1.5]));
    assert_eq!(v[3], serde_json::json!([4, 1.25]));

    let out = run(&["gallery", "--name", "circles", "--n", "100"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let partial = v["partial"].as_f64().unwrap();
    let tail = v["tail_bound"].as_f64().unwrap();
    let limit = std::f64::consts::PI.powi(3) / 6.0;
    assert!(partial < limit && limit < partial + tail);
}

#[test]
fn geodesic_samples_land_on_the_grid() {
    let dir = tempdir("geodesic");
    let a = write_file(
        &dir,
        "a.json",
        r#"{"space":"halfplane:linf","points":[{"pt":[0,10],"mult":1}]}"#,
    );
    let b = write_file(
        &dir,
        "b.json",
        r#"{"space":"halfplane:linf","points":[{"pt":[1,9],"mult":1}]}"#,
    );
    let out = run(&["geodesic", "--space", "halfplane:linf", "--p", "inf",
                    "--t-grid", "0,0.5,1", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1]["t"], serde_json::json!(0.5));
    assert_eq!(
        lines[1]["diagram"]["points"][0]["pt"],
        serde_json::json!([0.5, 9.5])
    );
}

#[test]
fn exit_codes_separate_validation_from_capability() {
    let dir = tempdir("exits");
    let w = write_file(
        &dir,
        "w.json",
        r#"{"space":"wedge_intervals","points":[{"pt":{"arc":1,"pos":0},"mult":1}]}"#,
    );
    let z = write_file(&dir, "z.json", r#"{"space":"wedge_intervals","points":[]}"#);

    // unknown space: validation failure
    let out = run(&["dist", "--space", "nope", "--p", "1",
                    w.to_str().unwrap(), z.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // malformed json: validation failure
    let bad = write_file(&dir, "bad.json", "{not json");
    let out = run(&["dist", "--space", "wedge_intervals", "--p", "1",
                    bad.to_str().unwrap(), z.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // geodesics need a distance-minimizing subset: capability failure
    let out = run(&["geodesic", "--space", "wedge_intervals", "--p", "1",
                    w.to_str().unwrap(), z.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // the unattained infimum is a result, not an error
    let out = run(&["dist", "--space", "wedge_intervals", "--p", "1",
                    w.to_str().unwrap(), z.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], serde_json::json!(1.0));
    assert_eq!(v["optimal"], serde_json::json!(false));
}

#[test]
fn infinite_values_print_as_inf() {
    let dir = tempdir("inf");
    let a = write_file(
        &dir,
        "a.json",
        r#"{"space":"halfplane:linf","points":[{"pt":[0,"inf"],"mult":1}]}"#,
    );
    let z = write_file(&dir, "z.json", r#"{"space":"halfplane:linf","points":[]}"#);
    let out = run(&["dist", "--space", "halfplane:linf", "--p", "2",
                    a.to_str().unwrap(), z.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], serde_json::json!("inf"));
}

#[test]
fn embed_agrees_with_dist() {
    let dir = tempdir("embed");
    let a = write_file(&dir, "a.json", r#"{"space":"ray","points":[{"pt":[3],"mult":1}]}"#);
    let b = write_file(&dir, "b.json", r#"{"space":"ray","points":[{"pt":[5],"mult":1}]}"#);
    let emb = run(&["embed", "--space", "ray", "--p", "1", "--n", "3",
                    a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(emb.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&emb)).unwrap();
    assert_eq!(v["value"], serde_json::json!(2.0));
    let dist = run(&["dist", "--space", "ray", "--p", "1",
                     a.to_str().unwrap(), b.to_str().unwrap()]);
    let d: serde_json::Value = serde_json::from_str(&stdout(&dist)).unwrap();
    assert_eq!(v["value"], d["value"]);
}

#[test]
fn diagnose_emits_witnesses() {
    let dir = tempdir("diagnose");
    let a = write_file(&dir, "a.json", ALPHA_L1);
    let b = write_file(&dir, "b.json", BETA_L1);
    let out = run(&["diagnose", "--space", "halfplane:l1", "--p", "1",
                    "--eps-schedule", "4,2,1",
                    a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["uniformly_upper_finite"], serde_json::json!(true));
    assert_eq!(v["uniformly_p_vanishing"], serde_json::json!(true));
    assert_eq!(v["relatively_compact_certified"], serde_json::json!(true));
    assert_eq!(v["scales"].as_array().unwrap().len(), 3);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempdir("outflag");
    let a = write_file(&dir, "a.json", ALPHA_L1);
    let target = dir.join("result.json");
    let out = run(&["dist", "--space", "halfplane:l1", "--p", "2",
                    "--out", target.to_str().unwrap(),
                    a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["value"], serde_json::json!(0.0));
}

use std::process::{Command, Output};

use serde_json::Value;

fn qp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qp-henon")).args(args).output().expect("run qp-henon")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn profile(step: &Value) -> (i64, i64) {
    (step["a"].as_i64().unwrap(), step["b"].as_i64().unwrap())
}

#[test]
fn orbit_with_c_equal_p() {
    let out = qp(&["--prime", "5", "--c", "5", "--steps", "22", "--escape-exp", "5000", "orbit", "--x", "255", "--y", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 23);
    assert_eq!((steps[1]["x"].as_str(), steps[1]["y"].as_str()), (Some("10"), Some("25")));
    assert_eq!(profile(&steps[21]), (1023, -1024));
    assert_eq!(profile(&steps[22]), (-1024, 2047));
    assert_eq!(v["verdict"]["kind"], "Completed");
}

#[test]
fn orbit_split_coordinates_and_csv() {
    let out = qp(&[
        "--c", "1/3", "--steps", "4", "--format", "csv", "orbit", "--x-num", "28", "--x-den", "3", "--y-num", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(rdr.headers().unwrap(), vec!["n", "x", "y", "a", "b", "region"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!((&rows[1][3], &rows[1][4]), ("0", "-2"));
    assert_eq!((&rows[2][3], &rows[2][4]), ("-2", "3"));
}

#[test]
fn forward_orbit_runs_the_three_cycle() {
    let out = qp(&["--c", "1", "--steps", "3", "orbit", "--forward", "--x", "-1", "--y", "-1"]);
    let v = json_of(&out);
    let xs: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["x"].as_str().unwrap()).collect();
    assert_eq!(xs, ["-1", "2", "-1", "-1"]);
    assert_eq!(v["direction"], "forward");
}

#[test]
fn undefined_inverse_is_a_verdict_not_an_error() {
    let out = qp(&["orbit", "--x", "1", "--y", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["verdict"]["kind"], "UndefinedInverse");
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = qp(&["--c", "1/3", "--steps", "40", "--bit-budget", "64", "orbit", "--x", "28/3", "--y", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["verdict"]["kind"], "BudgetExceeded");
}

#[test]
fn certified_orbit_agrees_with_exact_profiles() {
    let exact = json_of(&qp(&["--prime", "5", "--c", "5", "--steps", "10", "orbit", "--x", "255", "--y", "10"]));
    let cert = json_of(&qp(&[
        "--prime", "5", "--c", "5", "--steps", "10", "orbit", "--x", "255", "--y", "10", "--precision", "40",
    ]));
    let prof = |v: &Value| v["steps"].as_array().unwrap().iter().map(profile).collect::<Vec<_>>();
    assert_eq!(prof(&exact), prof(&cert));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qp(&["--prime", "4", "grid"]).status.code(), Some(2));
    assert_eq!(qp(&["--c", "1/0", "grid"]).status.code(), Some(2));
    assert_eq!(qp(&["--c", "0", "grid"]).status.code(), Some(2));
    assert_eq!(qp(&["orbit", "--x", "abc"]).status.code(), Some(2));
    assert_eq!(qp(&["verify", "no-such-campaign"]).status.code(), Some(2));
    assert_eq!(qp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qp(&["--help"]).status.code(), Some(0));
}

#[test]
fn classify_profile_and_point() {
    let v = json_of(&qp(&["--c", "1/9", "classify", "--a", "1", "--b", "1"]));
    assert_eq!((&v["region"]["name"], &v["region"]["index"]), (&Value::from("J"), &Value::from(0)));
    let v = json_of(&qp(&["--c", "1", "classify", "--x", "1/27", "--y", "1/9"]));
    assert_eq!((&v["region"]["name"], &v["region"]["index"]), (&Value::from("M"), &Value::from(3)));
}

#[test]
fn fixed_points_output() {
    let v = json_of(&qp(&["--c", "1/4", "fixed-points"]));
    assert_eq!(v["square_class"], "zero");
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(v["points"][0]["exact"], "1/2");
    let v = json_of(&qp(&["--prime", "5", "--c", "2", "fixed-points"]));
    assert_eq!(v["square_class"], "non-square");
    assert!(v["points"].as_array().unwrap().is_empty());
    let csv_out = qp(&["--c", "-6", "--format", "csv", "fixed-points"]);
    let mut rdr = csv::Reader::from_reader(&csv_out.stdout[..]);
    assert_eq!(rdr.headers().unwrap(), vec!["kind", "x", "y"]);
    assert!(rdr.records().count() >= 2);
}

#[test]
fn measure_outputs() {
    let v = json_of(&qp(&["measure", "--tn", "--n", "3"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // mu(T_0) = 3^F_2 (2/3)^2 = 4.
    assert_eq!(rows[0]["measure"], "4/1");
    assert_eq!(rows[3]["measure"], "2916/1");
    assert_eq!(rows[0]["ratio"], "4/9");
    let v = json_of(&qp(&["--c", "1/9", "--window", "20", "measure", "--region", "J0"]));
    assert_eq!(v["label"]["name"], "J");
    assert!(v["exact"].as_str().is_some());
    assert_eq!(qp(&["measure"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = qp(&["verify", "negative-control"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["campaign"], "negative-control");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j0.json");
    std::fs::write(
        &path,
        r#"{"name": "j0", "entries": [
            {"id": "large/j0-invariant", "d": 1, "samples": 20},
            {"id": "large/j0-invariant", "d": 2, "samples": 50}
        ]}"#,
    )
    .unwrap();
    let out = qp(&["--format", "csv", "verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<csv::StringRecord> =
        csv::Reader::from_reader(&out.stdout[..]).records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);

    std::fs::write(&path, r#"{"name": "bad", "entries": [{"id": "nope", "d": 1}]}"#).unwrap();
    assert_eq!(qp(&["verify", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn grid_json_matches_csv() {
    let csv_out = qp(&["--c", "1/9", "--window", "5", "grid"]);
    let json_out = qp(&["--c", "1/9", "--window", "5", "--format", "json", "grid"]);
    let from_csv: Vec<csv::StringRecord> =
        csv::Reader::from_reader(&csv_out.stdout[..]).records().map(Result::unwrap).collect();
    let from_json = json_of(&json_out);
    let from_json = from_json.as_array().unwrap();
    assert_eq!(from_csv.len(), 121);
    assert_eq!(from_json.len(), 121);
    for (r, j) in from_csv.iter().zip(from_json) {
        assert_eq!(r[0].parse::<i64>().unwrap(), j["a"].as_i64().unwrap());
        assert_eq!(r[2], *j["name"].as_str().unwrap());
    }
}

use std::process::{Command, Output};

use involution_occ::cli::{to_json, Report};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_involution-occ"))
        .args(args)
        .env_remove("INVOLUTION_OCC_JOBS")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn reports_round_trip_byte_identically() {
    let commands: [&[&str]; 7] = [
        &["exact", "--m", "6", "--f", "2"],
        &["oracle", "--m", "4", "--f", "0"],
        &["sample", "--m", "20", "--f", "4", "--trials", "300", "--seed", "7"],
        &["concentration", "--m", "40", "--trials", "200", "--seed", "7"],
        &["threshold", "--m", "200", "--trials", "5", "--seed", "3", "--random-phis", "3"],
        &["witness", "--m", "200", "--trials", "3", "--seed", "3", "--random-phis", "2", "--mu", "0.1"],
        &["factorial", "--p", "101", "--output-format", "json"],
    ];
    for args in commands {
        let text = stdout(args);
        let report: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json(&report).unwrap(), text, "{args:?}");
        assert!(text.contains("\"schema_version\": 1"));
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["sample", "--m", "30", "--trials", "1000", "--seed", "42"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "3"]);
    assert_eq!(a, stdout(&with_jobs));
    let other = stdout(&["sample", "--m", "30", "--trials", "1000", "--seed", "43"]);
    assert_ne!(a, other);
}

#[test]
fn jobs_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_involution-occ"))
        .args(["sample", "--m", "10", "--trials", "50", "--seed", "1"])
        .env("INVOLUTION_OCC_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["exact", "--m", "3"]).status.code(), Some(1));
    assert_eq!(run(&["exact", "--m", "4", "--f", "1"]).status.code(), Some(1));
    assert_eq!(run(&["exact", "--m", "4", "--nope"]).status.code(), Some(1));
    assert_eq!(run(&["nope"]).status.code(), Some(1));
    assert_eq!(run(&["threshold", "--m", "100"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", "--m", "20"]).status.code(), Some(1));
    assert_eq!(run(&["factorial", "--p", "91"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing").join("out.json");
    let out = run(&["exact", "--m", "4", "--output-path", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"m": 8, "f": 2, "k": 1, "seed": 5}"#).unwrap();
    let from_file = stdout(&["exact", "--config", config.to_str().unwrap()]);
    assert_eq!(from_file, stdout(&["exact", "--m", "8", "--f", "2", "--k", "1"]));
    let overridden = stdout(&["exact", "--config", config.to_str().unwrap(), "--f", "0"]);
    assert_eq!(overridden, stdout(&["exact", "--m", "8", "--f", "0", "--k", "1"]));

    std::fs::write(&config, r#"{"m": 8, "colour": "red"}"#).unwrap();
    assert_eq!(run(&["exact", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn output_path_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "factorial",
        "--p",
        "13",
        "--output-format",
        "csv",
        "--output-path",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("row,p,k,m_k,"));
    assert!(text.contains("k,13,1,6,0.5,"));
    assert!(text.trim_end().ends_with("summary,13,,,,,,9,true"));

    let csv = stdout(&["exact", "--m", "4", "--k", "1", "--format", "csv"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "4,0,1,1/2,128,1/4,0.5,0.25");

    let default = stdout(&["factorial", "--p", "13"]);
    assert!(default.contains("k,13,0,3,"));
}

#[test]
fn oracle_reads_an_involution_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    std::fs::write(&path, r#"{"m": 4, "map": [3, 2, 1, 0]}"#).unwrap();
    let text = stdout(&["oracle", "--involution", path.to_str().unwrap()]);
    let Report::Oracle(o) = serde_json::from_str(&text).unwrap() else {
        panic!("expected an oracle report");
    };
    assert_eq!(o.involution, vec![3, 2, 1, 0]);
    assert_eq!((o.report.per_k[1].sum_mk, o.report.per_k[1].sum_mk_sq), (32, 128));

    std::fs::write(&path, r#"{"m": 4, "map": [1, 2, 3, 0]}"#).unwrap();
    assert_eq!(run(&["oracle", "--involution", path.to_str().unwrap()]).status.code(), Some(1));
}

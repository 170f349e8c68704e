use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn boxdelta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxdelta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_state_json() {
    let out = boxdelta(&["solve", "--family", "sym-rep", "--gamma", "10", "--etaN", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["family"], "sym-rep");
    assert!((v["left"]["k"].as_f64().unwrap() - 3.067).abs() < 1e-3);
    assert!((v["left"]["m"].as_f64().unwrap() - 0.433).abs() < 1e-3);
    assert!((v["mu"].as_f64().unwrap() - 13.48).abs() < 1e-2);
}

#[test]
fn exit_codes() {
    assert_eq!(boxdelta(&["--help"]).status.code(), Some(0));
    let usage = boxdelta(&["solve", "--family", "sym-rep", "--etaN", "1", "--unknown"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert_eq!(boxdelta(&["modes", "--count", "1"]).status.code(), Some(1));
    let solver = boxdelta(&["solve", "--family", "asym-att", "--gamma", "10", "--etaN", "-1"]);
    assert_eq!(solver.status.code(), Some(2));
}

#[test]
fn elliptic_eval_uses_fifteen_digits() {
    let out = boxdelta(&["elliptic", "eval", "--", "-0.5", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let sn = text.lines().find(|l| l.starts_with("sn,")).unwrap();
    assert_eq!(sn, "sn,-0.474215622711821");
    assert!(text.lines().any(|l| l.starts_with("epsilon,")));
}

#[test]
fn modes_csv() {
    let text = stdout(&boxdelta(&["modes", "--gamma", "10", "--count", "4"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,parity,k,energy");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,symmetric,2.6536"));
    assert!(lines[2].starts_with("1,antisymmetric,3.14159265358979"));
}

#[test]
fn sweep_is_bit_reproducible_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        let path = dir.path().join(name).to_string_lossy().into_owned();
        let out = boxdelta(&[
            "--out", &path, "sweep", "--family", "asym-rep", "--gamma", "10", "--etaN-range", "2", "3", "--step", "0.25",
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("wrote"));
        std::fs::read(&path).unwrap()
    };
    let a = args("a.csv");
    let b = args("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eta_n,mu,energy_per_particle,z_exact,node_count,converged");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].ends_with(",false"), "below the pitchfork: {}", lines[1]);
    assert!(lines[5].ends_with(",true"));
    assert!(!text.contains('\r'));

    let record: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.run.json")).unwrap()).unwrap();
    let other: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.csv.run.json")).unwrap()).unwrap();
    assert_eq!(record["command"], "sweep");
    assert_eq!(record["parameters"]["sweep.family"], "asym-rep");
    assert_eq!(record["input_hash"].as_str().unwrap().len(), 64);
    assert_eq!(record["input_hash"], other["input_hash"]);
    assert!(Path::new(record["outputs"][0].as_str().unwrap()).ends_with("a.csv"));
}

#[test]
fn json_format_for_tables() {
    let out = boxdelta(&["--format", "json", "modes", "--count", "2"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["parity"], "antisymmetric");
}

#[test]
fn stability_csv_columns() {
    let text = stdout(&boxdelta(&[
        "stability", "--family", "sym-att", "--gamma", "10", "--etaN-range", "-1.5", "-2.5", "--step", "0.5",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eta_n,re_lambda1,im_lambda1,re_lambda2,im_lambda2,classification");
    assert!(lines[1].ends_with(",stable"));
    assert!(lines[3].ends_with(",non_oscillatory_unstable"));
}

#[test]
fn oracle_ground_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.csv");
    let out = boxdelta(&[
        "oracle",
        "ground",
        "--gamma",
        "10",
        "--etaN",
        "-5",
        "--trajectory",
        traj.to_str().unwrap(),
        "--record-every",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["z_asym"].as_f64().unwrap() > 0.5);
    let text = std::fs::read_to_string(traj).unwrap();
    assert!(text.starts_with("t,x,density\n"));
    assert!(text.lines().count() > 256);
}

#[test]
fn critical_table_has_all_estimates() {
    let text = stdout(&boxdelta(&["critical", "--gamma-range", "10", "20", "--step", "10"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "gamma,exact_attractive,exact_repulsive,variational_attractive,variational_repulsive,sacchetti,malomed_large,malomed_small"
    );
    let row: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[1] + 2.0737).abs() < 1e-3 && (row[2] - 2.3389).abs() < 1e-3);
}

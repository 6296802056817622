use std::process::{Command, Output};

fn cyclespec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclespec")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn decompose_example() {
    let out = cyclespec(&["decompose", "--n", "4", "--k", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "partition,closed_form,brute_force\n\"[4]\",1,1\n\"[2,2]\",1,1\n\"[2,1,1]\",-1,-1\n# verdict PASS\n"
    );
    let json: serde_json::Value = serde_json::from_slice(&cyclespec(&["decompose", "--n", "4", "--k", "2"]).stdout).unwrap();
    assert_eq!(json["verdict"], "PASS");
    assert_eq!(json["closed_form"], json["brute_force"]);
}

#[test]
fn matrix_tree_on_bundled_triangle() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/triangle.txt");
    let out = cyclespec(&["matrix-tree", "--graph", file]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "spectral=3 tree_sum=3\n");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("config: "), "{err}");
}

#[test]
fn prob_n_cycle_example() {
    let out = cyclespec(&["prob-n-cycle", "--builder", "complete:4", "--t-grid", "1"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = json["values"][0].as_f64().unwrap();
    assert!((v - 0.25 * (1.0 - (-4.0f64).exp()).powi(3)).abs() < 1e-14);
    assert!((v - 0.236).abs() < 1e-3);
}

#[test]
fn formats_are_honored() {
    let csv = stdout(&cyclespec(&["expect", "--k", "2", "--builder", "path:4", "--t-grid", "lin:0:2:3", "--format", "csv"]));
    assert!(csv.starts_with("t,value,bound\n0,0,"), "{csv}");
    assert_eq!(csv.lines().count(), 4);
    let hyper = stdout(&cyclespec(&["hypercube", "--d", "3", "--t-grid", "log:0.1:10:4", "--format", "csv"]));
    assert_eq!(hyper.lines().next(), Some("t,value"));
    let bound = stdout(&cyclespec(&["bound", "--n", "5", "--k", "2", "--lambda1", "1", "--t-grid", "0"]));
    let json: serde_json::Value = serde_json::from_str(&bound).unwrap();
    assert_eq!(json["values"][0].as_f64(), Some(121.5));
    let sim = stdout(&cyclespec(&[
        "simulate", "--builder", "path:3", "--replicas", "100", "--checkpoints", "0,1", "--observables", "s_1,full_cycle", "--format", "csv",
    ]));
    assert_eq!(sim.lines().next(), Some("observable,t,mean,stderr,replicas"));
    assert_eq!(sim.lines().nth(1), Some("s_1,0,3,0,100"));
    let torus = stdout(&cyclespec(&["torus-equilibration", "--dim", "3", "--sides", "5,7", "--format", "json"]));
    let json: serde_json::Value = serde_json::from_str(&torus).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_reports_z_scores() {
    let out = cyclespec(&["simulate", "--builder", "complete:4", "--replicas", "2000", "--seed", "3", "--checkpoints", "1"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let full = json["estimates"].as_array().unwrap().iter().find(|e| e["observable"] == "full_cycle").unwrap();
    assert!(full["z"].is_number());
    assert_eq!(json["config"]["master_seed"], 3);
}

#[test]
fn isospectral_and_coeffs() {
    let iso: serde_json::Value = serde_json::from_slice(&cyclespec(&["isospectral", "--seed", "1"]).stdout).unwrap();
    assert_eq!(iso["found"], true);
    let none: serde_json::Value =
        serde_json::from_slice(&cyclespec(&["isospectral", "--seed", "1", "--attempts", "0"]).stdout).unwrap();
    assert_eq!(none["found"], false);
    let a = stdout(&cyclespec(&["coeffs", "--n", "7", "--k", "5", "--via", "pieri", "--format", "csv"]));
    let b = stdout(&cyclespec(&["coeffs", "--n", "7", "--k", "5", "--via", "closed", "--format", "csv"]));
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    assert_eq!(cyclespec(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cyclespec(&["decompose", "--n", "4", "--k", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(cyclespec(&["decompose", "--n", "4", "--k", "5"]).status.code(), Some(2));
    assert_eq!(cyclespec(&["prob-n-cycle", "--builder", "path:3", "--t-grid", "2,1"]).status.code(), Some(2));
    assert_eq!(cyclespec(&["matrix-tree", "--graph", "/nonexistent/graph.txt"]).status.code(), Some(2));
    let cap = cyclespec(&["decompose", "--n", "9", "--k", "2"]);
    assert_eq!(cap.status.code(), Some(3));
    assert!(String::from_utf8(cap.stderr).unwrap().contains("n <= 8"));
    assert_eq!(cyclespec(&["expect", "--k", "2", "--builder", "path:13", "--t-grid", "1"]).status.code(), Some(3));
    assert_eq!(cyclespec(&["verify", "--n-max", "9"]).status.code(), Some(3));
    assert_eq!(cyclespec(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_small_table() {
    let out = cyclespec(&["verify", "--n-max", "4"]);
    assert!(out.status.success());
    let table = stdout(&out);
    assert!(table.ends_with("18 checks, 0 failed\n"), "{table}");
    assert!(!table.contains("FAIL"));
}

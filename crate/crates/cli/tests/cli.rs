use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerprim")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

#[test]
fn ec_methods_agree_on_two_bump() {
    let out = run(&["ec", "--field", "two_bump", "--level", "0.3", "--method", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let e = &r["result"]["levels"][0]["euler"];
    assert_eq!(e["cubical"], 1);
    assert_eq!(e["bicov"], 1);
    assert_eq!(e["morse"], 1);
    assert_eq!(r["config"]["command"]["ec"]["field"], "two_bump");
}

#[test]
fn primitive_reports_both_sides_and_gap() {
    let out = run(&["primitive", "--field", "radial_exp", "--testfn", "bump:0.2:0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let i = r["result"]["i_f"]["re"].as_f64().unwrap();
    let chi = r["result"]["chi"]["value"].as_f64().unwrap();
    assert!((i - chi).abs() < 1e-3);
    assert!((r["result"]["gap"].as_f64().unwrap() - (i - chi).abs()).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    // disagreement of a too coarse lattice with the Morse count
    let out = run(&["ec", "--field", "bump_ring", "--level", "0.4", "--spacing", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], false);
    assert_eq!(run(&["ec", "--level", "x"]).status.code(), Some(2));
    assert_eq!(run(&["ec", "--field", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // a level on the saddle value is a module error, reported with a null result
    let out = run(&["ec", "--level", "0.7357588823428847", "--method", "morse"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert!(r["error"].as_str().unwrap().contains("critical"));
    assert!(r["result"].is_null());
}

#[test]
fn config_file_is_overridden_by_flags_and_outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 9\n[ec]\nfield = radial_exp\nlevel = 0.5,0.9\nmethod = cubical\n").unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "ec",
        "--level",
        "0.4",
        "--output",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["config"]["command"]["ec"]["field"], "radial_exp");
    assert_eq!(r["config"]["command"]["ec"]["level"], "0.4");
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "level,method,euler\n0.4,cubical,1\n");
    let out = run(&["--seed", "3", "--config", cfg.to_str().unwrap(), "ec"]);
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 3);
    assert_eq!(r["result"]["levels"].as_array().unwrap().len(), 2);
}

#[test]
fn shotnoise_is_seeded_and_writes_germs() {
    let dir = tempfile::tempdir().unwrap();
    let germs = dir.path().join("germs.txt");
    let args = ["--seed", "5", "shotnoise", "--t", "1", "--reps", "200", "--stationary", "false"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut with_germs = args.to_vec();
    with_germs.extend(["--germs-out", germs.to_str().unwrap()]);
    assert_eq!(run(&with_germs).status.code(), Some(0));
    assert!(std::fs::read_to_string(&germs).unwrap().starts_with("seed "));
}

#[test]
fn kacrice_tent_ratio_is_two() {
    let out = run(&["kacrice", "--profile", "tent"]);
    assert_eq!(out.status.code(), Some(0));
    let ratio = report(&out)["result"]["ratio"].as_f64().unwrap();
    assert!((ratio - 2.0).abs() < 1e-12);
}

#[test]
fn validate_subset_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = run(&["validate", "--only", "6,12", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["summary"]["total"], 2);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("id,name,passed,tolerance,wall_time_ms\n6,kac_rice,true,"));
    assert_eq!(run(&["validate", "--only", "15"]).status.code(), Some(2));
}

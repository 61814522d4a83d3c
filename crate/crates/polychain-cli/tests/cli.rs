use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polychain")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    (serde_json::from_str(&stdout(&o)).unwrap_or(Value::Null), o.status.code().unwrap())
}

#[test]
fn four_corner_norms() {
    let chain = data("four_corner.json");
    let (r, code) = json(&["tflatnorm", "--chain", &chain, "--complex=-1,-1:1:3,3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["value"], "1");
    assert_eq!(r["results"]["type"], serde_json::json!([0, 0]));
    let (r, code) = json(&["flatnorm", "--chain", &chain, "--complex=-1,-1:1:3,3", "--pad-check", "--expect", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["value"], "2");
    assert_eq!(r["results"]["pad_check"]["changed"], false);
    assert_eq!(r["verdicts"]["matches_expected"], true);
}

#[test]
fn diagonal_is_not_split() {
    let o = run(&["split-test", "--chain", &data("diagonal.json"), "--k1", "1", "--k2", "0", "--n1", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NotSplit"));
    let (r, _) = json(&["split-test", "--chain", &data("diagonal.json"), "--k1", "1", "--k2", "0", "--n1", "1"]);
    assert_eq!(r["results"]["verdict"], "NotSplit");
    assert_eq!(r["verdicts"]["split"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["boundary", "--chain", "/nonexistent/chain.json"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["slice", "--chain", &data("diagonal.json"), "--gamma", "1", "--at", "1"]).status.code(), Some(1));
    assert_eq!(run(&["mass", "--chain", &data("diagonal.json"), "--expect", "1.4"]).status.code(), Some(2));
    assert_eq!(run(&["mass", "--chain", &data("diagonal.json"), "--expect", "1.4142", "--tolerance", "1/10000"]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let args = ["reproduce-all", "--only", "4", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let chain = data("triangle.json");
    let a = run(&["info", "--chain", &chain, "--json"]);
    let b = run(&["info", "--chain", &chain, "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    // restriction to the whole space is the identity, so the output is the canonical form of the input
    let (first, code) = json(&["restrict", "--chain", &data("triangle.json"), "--box", "*:*,*:*"]);
    assert_eq!(code, 0);
    let path = dir.path().join("once.json");
    std::fs::write(&path, serde_json::to_string(&first["results"]).unwrap()).unwrap();
    let (second, _) = json(&["restrict", "--chain", path.to_str().unwrap(), "--box", "*:*,*:*"]);
    assert_eq!(first["results"], second["results"]);

    let (embedded, code) = json(&["embed", "--tensor", &data("square_tensor.json")]);
    assert_eq!(code, 0);
    let path = dir.path().join("square.json");
    std::fs::write(&path, serde_json::to_string(&embedded["results"]).unwrap()).unwrap();
    let (parts, code) = json(&["jdecompose", "--chain", path.to_str().unwrap(), "--n1", "1"]);
    assert_eq!(code, 0);
    let comps = parts["results"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0]["type"], serde_json::json!([1, 1]));
    let tpath = dir.path().join("tensor.json");
    std::fs::write(&tpath, serde_json::to_string(&comps[0]["tensor"]).unwrap()).unwrap();
    let (again, _) = json(&["embed", "--tensor", tpath.to_str().unwrap()]);
    assert_eq!(again["results"], embedded["results"]);
}

#[test]
fn lab_commands() {
    let (r, code) = json(&["lab", "counterexample", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["mass"]["exact"], "75/8");
    assert!(r["verdicts"].as_object().unwrap().values().all(|v| v == true));
    let (r, code) = json(&["lab", "ip-search", "--n", "3", "--terms", "3", "--bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["min_found"], 8);
    assert_eq!(r["results"]["ratio_to_mass"], "4/3");
    let (r, code) = json(&["lab", "staircase", "--level", "4", "--boundary-growth"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["boundary_growth"][4]["boundary_mass"], "32");
    let o = run(&["lab", "probe", "--chain", &data("diagonal.json"), "--axis", "1", "--levels", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn slice_and_chi() {
    let (r, code) = json(&["slice", "--chain", &data("triangle.json"), "--gamma", "1", "--at", "1", "--unprojected"]);
    assert_eq!(code, 0);
    let cell = &r["results"]["slice"]["cells"][0];
    assert_eq!(cell["vertices"], serde_json::json!([["1", "0"], ["1", "1"]]));
    assert_eq!(cell["coeff"]["value"], "-1");
    let o = run(&["chi", "--chain", &data("four_corner.json")]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(&["collapse", "--tensor", &data("square_tensor.json"), "--level", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

use std::process::{Command, Output};

use serde_json::Value;

fn tate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tate")).args(args).env_remove("TATE_SEED").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let o = tate(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).expect("valid JSON");
    assert_eq!(v["schema"], 1);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn resolve_reports_ranks_and_checks() {
    let v = json(&["resolve", "--group", "C2xC2", "--window=-2..2", "--check-exact", "--json"]);
    let ranks: Vec<u64> = v["ranks"].as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, [2, 1, 1, 2, 3]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["resolve", "--group", "C6"][..],
        &["resolve", "--group", "D8"],
        &["resolve", "--group", "C4", "--field", "3"],
        &["resolve", "--group", "C4", "--window", "3..1"],
        &["massey", "--group", "C3", "--triple", "x,x"],
        &["massey", "--group", "C3", "--triple", "x,w,x"],
        &["verify", "--criterion", "12"],
        &["verify", "--suite", "other"],
        &["frobnicate"],
    ] {
        assert_eq!(tate(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn q8_table_text_lists_the_nonzero_entries() {
    let o = tate(&["m-table", "--group", "Q8", "--text"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("m(x, y, x) = x^2 "));
    assert!(s.contains("m(s, x, y) = x*s + y*s"));
    assert!(s.contains("m(y^2*s, y, x) = x^2*y*s"));
    assert!(s.contains("28 nonzero of 432 triples"));
}

#[test]
fn q8_table_json_round_trips() {
    let o = tate(&["m-table", "--group", "Q8", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nonzero"], 28);
    assert_eq!(v["entries"].as_array().unwrap().len(), 432);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    let xyx = v["entries"].as_array().unwrap().iter().find(|e| e["a"] == "x" && e["b"] == "y" && e["c"] == "x").unwrap();
    assert_eq!(xyx["value"], "x^2");
}

#[test]
fn output_is_deterministic() {
    for args in [&["m-table", "--group", "C3", "--window=-3..3", "--json"][..], &["gamma", "--group", "C2xC2xC2", "--json"]] {
        assert_eq!(tate(args).stdout, tate(args).stdout, "{args:?}");
    }
}

#[test]
fn gamma_verdicts() {
    let q8 = json(&["gamma", "--group", "Q8", "--json"]);
    assert_eq!(q8["trivial"], false);
    assert_eq!(q8["witness"]["kind"], "coboundary");
    let c3 = json(&["gamma", "--group", "C3", "--json"]);
    assert_eq!(c3["trivial"], false);
    assert_eq!(c3["witness"]["representative"], "y");
    let klein = json(&["gamma", "--group", "C2xC2", "--json"]);
    assert_eq!(klein["witness"]["kind"], "massey");
    assert_eq!(klein["witness"]["contains_zero"], false);
    let c4 = json(&["gamma", "--group", "C4", "--json"]);
    assert_eq!(c4["trivial"], true);
    assert_eq!(c4["certified"], true);
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_tate")).args(["gamma", "--group", "C2", "--json"]).env("TATE_SEED", "17").output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 17);
}

#[test]
fn ordinary_massey_product() {
    let v = json(&["massey", "--group", "C3", "--triple", "x,x,x", "--json"]);
    assert_eq!(v["representative"], serde_json::json!([["y"]]));
    assert_eq!(v["indeterminacy_dim"], 0);
    assert_eq!(v["contains_zero"], false);
    let s = stdout(&tate(&["massey", "--group", "C2xC2", "--triple", "v2, phi(0,1), v1"]));
    assert!(s.starts_with("<v2, phi(0,1), v1> = u1 + indeterminacy of dimension 0"), "{s}");
}

#[test]
fn matric_massey_product_from_file() {
    let path = std::env::temp_dir().join(format!("tate-matric-{}.json", std::process::id()));
    let x = r#"{"entries": [["y", "x + y"], ["x", "y"]]}"#;
    std::fs::write(&path, format!(r#"{{"W": {x}, "X": {x}, "Y": {x}}}"#)).unwrap();
    let v = json(&["massey", "--group", "Q8", "--matric", path.to_str().unwrap(), "--json"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(v["contains_zero"], false);
    assert_eq!(v["representative"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_runs_selected_criteria() {
    let o = tate(&["verify", "--criterion", "2", "--criterion", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("[PASS] criterion 2"));
    assert!(s.contains("[PASS] criterion 3"));
    let v = json(&["verify", "--criterion", "3", "--json"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"][0]["id"], 3);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn planarcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planarcc")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn triangle(dir: &Path, weight: &str) -> String {
    let path = dir.join(format!("triangle{weight}.json"));
    let text = format!(
        r#"{{"name":"triangle","vertex_count":3,"edges":[[0,1,"{weight}"],[1,2,"{weight}"],[2,0,"{weight}"]],"rotation":[[2,0],[0,1],[1,2]],"metadata":{{"generator":"manual"}}}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn repulsive_triangle_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let out = planarcc(&["solve", &triangle(dir.path(), "-1")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["bound"], -3.0);
    assert_eq!(doc["energy"], -3.0);
    assert_eq!(doc["certificate"], true);
    assert_eq!(doc["clusters"], 3);
    assert_eq!(doc["settings"]["tol"], 1e-6);
    assert_eq!(doc["settings"]["restarts"], 10);
    assert_eq!(doc["labels"].as_array().unwrap().len(), 3);
}

#[test]
fn attractive_grid_is_one_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let gen = planarcc(&["gen", "--grid", "6x4", "--uniform", "0.1,1", "--out", path_str(&file)]);
    assert_eq!(gen.status.code(), Some(0));
    let out = planarcc(&["solve", path_str(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["bound"], 0.0);
    assert_eq!(doc["energy"], 0.0);
    assert_eq!(doc["clusters"], 1);
}

#[test]
fn remaining_gap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    planarcc(&["gen", "--random", "5", "--seed", "379", "--out", path_str(&file)]);
    let out = planarcc(&["solve", path_str(&file)]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert_eq!(doc["certificate"], false);
    assert!(doc["gap"].as_f64().unwrap() > 1e-6);
    // the gap is the relaxation's: the clustering is optimal
    let oracle = stdout_json(&planarcc(&["oracle", path_str(&file), "--cc", "--full-lp"]));
    assert_eq!(oracle["cc"]["value"], doc["energy"]);
    assert!((oracle["full_lp"]["value"].as_f64().unwrap() - doc["bound"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn gen_is_deterministic() {
    let a = planarcc(&["gen", "--grid", "20x20", "--beta", "0.35", "--seed", "1"]);
    let b = planarcc(&["gen", "--grid", "20x20", "--beta", "0.35", "--seed", "1"]);
    let c = planarcc(&["gen", "--grid", "20x20", "--beta", "0.35", "--seed", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout_json(&a)["vertex_count"], 400);
}

#[test]
fn solve_output_is_deterministic_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    planarcc(&["gen", "--grid", "12x12", "--beta", "0.2", "--seed", "4", "--out", path_str(&file)]);
    let mut docs: Vec<Value> = [vec![], vec!["--sequential"]]
        .iter()
        .map(|extra| {
            let mut args = vec!["solve", path_str(&file), "--seed", "3"];
            args.extend(extra);
            let mut doc = stdout_json(&planarcc(&args));
            doc.as_object_mut().unwrap().remove("wall_times");
            doc
        })
        .collect();
    let seq = docs.pop().unwrap();
    assert_eq!(docs[0], seq);
    assert!(seq["gap"].as_f64().unwrap() >= -1e-6);
}

#[test]
fn bound_then_decode_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let saved = dir.path().join("bound.json");
    planarcc(&["gen", "--grid", "10x10", "--beta", "0.27", "--seed", "7", "--out", path_str(&file)]);
    let bound = planarcc(&["bound", path_str(&file), "--out", path_str(&saved)]);
    assert_eq!(bound.status.code(), Some(0));
    let decode = planarcc(&["decode", path_str(&file), "--bound", path_str(&saved)]);
    let solve = planarcc(&["solve", path_str(&file)]);
    assert_eq!(decode.status.code(), solve.status.code());
    let (d, s) = (stdout_json(&decode), stdout_json(&solve));
    for key in ["bound", "energy", "certificate", "labels", "method"] {
        assert_eq!(d[key], s[key], "{key}");
    }
    assert_eq!(stdout_json(&bound)["bound"], s["bound"]);
}

#[test]
fn decode_rejects_a_bound_for_another_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, saved) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("s.json"));
    planarcc(&["gen", "--grid", "4x4", "--beta", "0.27", "--out", path_str(&a)]);
    planarcc(&["gen", "--grid", "5x4", "--beta", "0.27", "--out", path_str(&b)]);
    planarcc(&["bound", path_str(&a), "--out", path_str(&saved)]);
    let out = planarcc(&["decode", path_str(&b), "--bound", path_str(&saved)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edges"));
}

#[test]
fn oracle_queries() {
    let dir = tempfile::tempdir().unwrap();
    let tri = triangle(dir.path(), "-1");
    let doc = stdout_json(&planarcc(&["oracle", &tri, "--cc", "--cc2", "--cck", "2", "--chain", "--full-lp"]));
    assert_eq!(doc["cc"]["value"], -3.0);
    assert_eq!(doc["cc2"]["value"], -2.0);
    assert_eq!(doc["cck"]["value"], -2.0);
    assert_eq!(doc["chain"]["passed"], true);
    assert_eq!(doc["full_lp"]["value"], -3.0);
    let none = planarcc(&["oracle", &tri]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    planarcc(&["gen", "--grid", "5x5", "--beta", "0.27", "--out", path_str(&file)]);
    let out = planarcc(&["oracle", path_str(&file), "--cc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bench_writes_rows_in_file_order() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["b_grid", "a_grid", "c_grid"];
    for (i, name) in names.iter().enumerate() {
        let file = dir.path().join(format!("{name}.json"));
        let seed = i.to_string();
        planarcc(&[
            "gen",
            "--grid",
            "8x8",
            "--beta",
            "0.27",
            "--seed",
            &seed,
            "--name",
            name,
            "--out",
            path_str(&file),
        ]);
    }
    let csv_path = dir.path().join("out.csv");
    let out = planarcc(&["bench", path_str(dir.path()), "--out", path_str(&csv_path), "--jobs", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,bound,energy,gap,certificate,batches,ms_bound,ms_decode");
    let order: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(order, ["a_grid", "b_grid", "c_grid"]);
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    for args in [
        vec!["solve", path_str(&missing)],
        vec!["solve", path_str(&bad)],
        vec!["solve", "--tol", "-1", path_str(&bad)],
        vec!["gen", "--grid", "1x9"],
        vec!["frobnicate"],
    ] {
        let out = planarcc(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

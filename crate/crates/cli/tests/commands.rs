use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Runs the binary and returns the exit code and the parsed report, which
/// must validate against the schema whenever one is printed.
fn run(args: &[&str]) -> (i32, Option<Value>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_crossfree")).args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let report = (!stdout.is_empty()).then(|| serde_json::from_str::<Value>(&stdout).unwrap());
    if let Some(r) = &report {
        let errors: Vec<String> = schema().iter_errors(r).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{args:?}: report violates the schema: {errors:?}\n{r:#}");
    }
    (code, report, stderr)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_the_row_column_crossing() {
    let (code, r, _) = run(&["check", path_str(&fixture("torus_rows_and_columns.json"))]);
    assert_eq!(code, 0);
    let res = &r.unwrap()["results"][0];
    assert_eq!(res["cross_free"], false);
    assert_eq!(res["non_piercing"], true);
    assert_eq!(res["host_genus"], 1);
    assert_eq!(res["crossing"]["darts"].as_array().unwrap().len(), 4);
}

#[test]
fn check_takes_several_files() {
    let files = ["example_system.json", "example_intersection.json", "rectangles.json"].map(fixture);
    let args: Vec<&str> = std::iter::once("check").chain(files.iter().map(|p| path_str(p))).collect();
    let (code, r, _) = run(&args);
    assert_eq!(code, 0);
    let results = r.unwrap()["results"].as_array().unwrap().clone();
    assert_eq!(results.len(), 3);
    assert!(results.iter().all(|x| x["cross_free"] == true && x["host_genus"] == 0));
}

#[test]
fn primal_then_verify() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("primal.json");
    let dot = dir.path().join("primal.dot");
    let system = fixture("example_primal.json");
    let (code, _, _) = run(&["primal", path_str(&system), "--audit", "--dot", path_str(&dot), "--output", path_str(&report)]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(schema().is_valid(&r));
    let mut names: Vec<&str> = r["support"]["vertices"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["a", "b", "d", "f"]);
    assert_eq!(r["verified"], true);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph \"support\" {"));

    let (code, v, _) = run(&["verify", path_str(&system), path_str(&report)]);
    assert_eq!(code, 0);
    assert_eq!(v.unwrap()["pass"], true);
}

#[test]
fn verify_rejects_a_broken_support() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("dual.json");
    let system = fixture("example_system.json");
    assert_eq!(run(&["dual", path_str(&system), "--output", path_str(&report)]).0, 0);
    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    // drop every support edge
    r["support"]["edges"] = Value::Array(vec![]);
    for (_, nbrs) in r["support"]["rotations"].as_object_mut().unwrap() {
        *nbrs = Value::Array(vec![]);
    }
    std::fs::write(&report, r.to_string()).unwrap();
    let (code, v, _) = run(&["verify", path_str(&system), path_str(&report)]);
    assert_eq!(code, 2);
    let v = v.unwrap();
    assert_eq!(v["is_support"], false);
    assert!(v["failing_hyperedge"].is_string());
}

#[test]
fn dual_and_intersection_on_grid_shorthand() {
    let (code, r, _) = run(&["dual", path_str(&fixture("rectangles.json")), "--audit"]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r["certified_genus"], 0);
    assert!(r["special_edges"].is_array());
    let (code, r, _) = run(&["intersection", path_str(&fixture("example_intersection.json")), "--sequential"]);
    assert_eq!(code, 0);
    assert_eq!(r.unwrap()["verified"], true);
}

#[test]
fn exit_codes() {
    let crossing = fixture("torus_rows_and_columns.json");
    let (code, r, err) = run(&["dual", path_str(&crossing)]);
    assert_eq!((code, r.is_none()), (2, true));
    assert!(err.contains("not cross-free"), "{err}");
    assert_eq!(run(&["primal", path_str(&fixture("example_system.json"))]).0, 2);
    assert_eq!(run(&["dual", path_str(&fixture("example_system.json")), "--budget", "1"]).0, 4);

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format_version\": 1,\n \"rotations\": {\"a\": [\"b\"]}}").unwrap();
    let (code, _, err) = run(&["check", path_str(&bad)]);
    assert_eq!(code, 3);
    assert!(err.contains("unknown vertex \"b\""), "{err}");
    std::fs::write(&bad, "{\"format_version\": 1,\n \"rotation\": {}}").unwrap();
    let (code, _, err) = run(&["check", path_str(&bad)]);
    assert_eq!(code, 3);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(run(&["check", path_str(&dir.path().join("missing.json"))]).0, 3);
}

#[test]
fn color_and_solve() {
    let (code, r, _) = run(&["color", path_str(&fixture("example_system.json")), "--mode", "dual"]);
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(r["proper"], true);
    assert!(r["color_count"].as_u64().unwrap() <= 4);

    let rect = fixture("rectangles.json");
    let (code, s, _) = run(&["solve", path_str(&rect), "--kind", "set_cover", "--k", "2", "--seed", "7"]);
    assert_eq!(code, 0);
    let s = s.unwrap();
    assert_eq!(s["feasible"], true);
    assert_eq!(s["variables"], 20);
    assert_eq!(s["locally_optimal"], true);
    assert_eq!(s["solution"]["certificate"]["k"], 2);

    let small = fixture("example_intersection.json");
    let (code, s, _) = run(&["solve", path_str(&small), "--kind", "capacitated_packing", "--capacity", "2", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(s.unwrap()["locally_optimal"], true);
    assert_eq!(run(&["solve", path_str(&small), "--kind", "capacitated_packing", "--seed", "1"]).0, 3);
}

#[test]
fn gen_is_seeded_and_grids_expand() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    for out in [&a, &b] {
        let args = ["gen", "--rows", "5", "--cols", "6", "--count", "6", "--k-count", "2", "--red", "0.3", "--seed", "9", "--out", path_str(out)];
        assert_eq!(run(&args).0, 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    // grid shorthand expands to explicit rotations with cell names
    let grid = fixture("rectangles.json");
    assert_eq!(run(&["from-grid", path_str(&grid), "--out", path_str(&c)]).0, 0);
    let expanded = std::fs::read_to_string(&c).unwrap();
    for (name, file) in [("primal", &a), ("intersection", &c)] {
        let (code, r, _) = run(&[name, path_str(file)]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(r.unwrap()["verified"], true);
    }
    assert!(expanded.contains("\"r1c3\""));
    assert_eq!(run(&["from-grid", path_str(&c), "--out", path_str(&a)]).0, 3, "already explicit");
}

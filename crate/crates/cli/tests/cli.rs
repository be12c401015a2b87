use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leafspace"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(root().join("schemas").join(name)).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).unwrap()
}

fn assert_valid(schema_name: &str, instance: &Value) {
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(instance) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("{schema_name}: {msgs:?}");
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str); 7] = [
        (&["gf", "--variant", "WO", "--n", "1", "--max-degree", "3"], "gf_wo1.txt"),
        (&["gf", "--variant", "WGL", "--n", "1"], "gf_wgl1.txt"),
        (&["compare", "--n", "2", "--degree", "4"], "compare_n2_d4.txt"),
        (&["realize", "--class", "y1*c1", "--n", "1", "--K", "3"], "realize_gv.txt"),
        (&["cdr", "--model", "models/circle_pushout.json", "--max-degree", "2"], "cdr_circle_pushout.txt"),
        (&["invariance", "--form", "dx0"], "invariance_dx0.txt"),
        (
            &["verify-homotopy", "--model", "models/edge_fiber.json", "--seed", "7", "--trials", "100", "--format", "json"],
            "verify_edge_fiber.json",
        ),
    ];
    for (args, file) in cases {
        assert_eq!(stdout(args), golden(file), "{args:?}");
    }
}

#[test]
fn gf_examples() {
    let wo = stdout(&["gf", "--variant", "WO", "--n", "1", "--max-degree", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&wo).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1]));
    assert!(wo.contains("y1*c1"));
    let wgl: Value = serde_json::from_str(&stdout(&["gf", "--variant", "WGL", "--n", "1", "--format", "json"])).unwrap();
    assert_eq!(wgl["betti"], serde_json::json!([1, 0, 1]));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["gf", "--variant", "W", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gf", "--variant", "X", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gf", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["gf", "--variant", "W", "--n", "9"]).status.code(), Some(1));
    assert_eq!(run(&["realize", "--class", "y2*c1*c1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["realize", "--class", "y1*c1", "--K", "1"]).status.code(), Some(2));
    assert_eq!(run(&["cdr", "--model", "models/missing.json"]).status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("leafspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("open.json");
    std::fs::write(
        &bad,
        r#"{"objects": [{"id": "P", "vertices": ["p"]}],
            "morphisms": [{"id": "id", "source": "P", "target": "P", "vertex_map": {"p": "p"}, "identity": true},
                          {"id": "s", "source": "P", "target": "P", "vertex_map": {"p": "p"}}]}"#,
    )
    .unwrap();
    assert_eq!(run(&["cdr", "--model", bad.to_str().unwrap()]).status.code(), Some(3));
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["cdr", "--model", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["verify-homotopy", "--model", "models/arrow.json"]).status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_leafspace"))
        .args(["cdr", "--model", "models/circle_pushout.json", "--max-degree", "3"])
        .env("LEAFSPACE_STRING_CAP", "10")
        .current_dir(root())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_outputs_match_schemas() {
    let json = |args: &[&str]| -> Value {
        let mut all = args.to_vec();
        all.extend(["--format", "json"]);
        serde_json::from_str(&stdout(&all)).unwrap()
    };
    assert_valid("gf.schema.json", &json(&["gf", "--variant", "WO", "--n", "2"]));
    assert_valid("compare.schema.json", &json(&["compare", "--n", "2"]));
    assert_valid("form.schema.json", &json(&["realize", "--class", "y1*c1"]));
    assert_valid("invariance.schema.json", &json(&["invariance", "--class", "y1*c1"]));
    assert_valid(
        "cdr.schema.json",
        &json(&["cdr", "--model", "models/circle_one_chart.json", "--max-degree", "1", "--representatives", "--family", "generator"]),
    );
    assert_valid(
        "homotopy_report.schema.json",
        &json(&["verify-homotopy", "--model", "models/point_fiber.json", "--trials", "5"]),
    );
}

#[test]
fn shipped_models_match_schema() {
    for entry in std::fs::read_dir(root().join("models")).unwrap() {
        let path = entry.unwrap().path();
        let value: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid("model.schema.json", &value);
    }
}

#[test]
fn manifest_records_digests() {
    let dir = std::env::temp_dir().join(format!("leafspace-manifest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let manifest = dir.join("run.json");
    let out = stdout(&[
        "verify-homotopy",
        "--model",
        "models/edge_fiber.json",
        "--seed",
        "3",
        "--trials",
        "4",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 3);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let digest = hex::encode(<sha2::Sha256 as sha2::Digest>::digest(out.as_bytes()));
    assert_eq!(m["result_sha256"], Value::String(digest));
    std::fs::remove_dir_all(&dir).ok();
}

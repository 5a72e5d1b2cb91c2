//! End-to-end runs of the binary: exit codes, report content, and schema
//! validation of every emitted JSON report against the shipped schema files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decision-regions"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a json report")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let text = fs::read_to_string(&path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&doc).expect("schema compiles")
}

fn assert_valid(report: &serde_json::Value, schema_file: &str) {
    let validator = schema(schema_file);
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(
        errors.is_empty(),
        "{schema_file} violations: {errors:#?}"
    );
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn certify_reports_validate_for_every_builtin() {
    for name in [
        "eq4-nonpyramidal",
        "eq5-relu",
        "lowrank-strips(0.1)",
        "tight-2-3-2(0.25)",
    ] {
        let out = run(&["certify", "--builtin", name]);
        let report = stdout_json(&out);
        assert_valid(&report, "certify-report.schema.json");
        assert_eq!(report["verdict"]["verdict"], "no_guarantee", "{name}");
    }
}

#[test]
fn builtin_network_json_validates_and_round_trips() {
    let dir = tmp();
    for name in ["eq4-nonpyramidal", "eq5-relu"] {
        let nets = decision_regions::net::builtin(name).unwrap();
        let text = nets.to_json_string();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_valid(&doc, "network.schema.json");

        let path = dir.path().join("net.json");
        fs::write(&path, &text).unwrap();
        let reloaded = decision_regions::net::load_network(&path).unwrap();
        assert_eq!(reloaded.to_json_string(), text, "byte-stable round trip");
    }
}

#[test]
fn regions_report_validates_and_counts_cells() {
    let out = run(&["regions", "--builtin", "eq4-nonpyramidal", "--class", "1"]);
    let report = stdout_json(&out);
    assert_valid(&report, "regions-report.schema.json");
    assert_eq!(report["n_cells"], 2);
    assert_eq!(report["decision_cells"].as_array().unwrap().len(), 2);
}

#[test]
fn connectivity_report_validates_single_class_and_all_classes() {
    let out = run(&["connectivity", "--builtin", "eq5-relu", "--class", "1"]);
    let report = stdout_json(&out);
    assert_valid(&report, "connectivity-report.schema.json");
    let components = report["reports"][0]["components"].as_array().unwrap();
    assert_eq!(components.len(), 2);

    let out = run(&["connectivity", "--builtin", "eq5-relu", "--engine", "backward"]);
    let report = stdout_json(&out);
    assert_valid(&report, "connectivity-report.schema.json");
    assert_eq!(report["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn preimage_report_validates_and_writes_stage_panels() {
    let dir = tmp();
    let json = dir.path().join("pre.json");
    let svg = dir.path().join("pre.svg");
    let out = run(&[
        "preimage",
        "--builtin",
        "eq5-relu",
        "--class",
        "1",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_valid(&report, "preimage-report.schema.json");
    assert!(!report["trace"]["stages"].as_array().unwrap().is_empty());

    assert!(svg.exists(), "main figure");
    let panels: Vec<PathBuf> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy().into_owned();
            n.starts_with("pre-") && n.ends_with(".svg")
        })
        .collect();
    assert!(panels.len() >= 5, "per-stage panels, got {}", panels.len());
}

#[test]
fn path_reports_validate_for_both_outcomes() {
    let out = run(&[
        "path",
        "--builtin",
        "eq5-relu",
        "--class",
        "1",
        "--from=-5,-5",
        "--to=0.25,0.25",
    ]);
    let report = stdout_json(&out);
    assert_valid(&report, "path-report.schema.json");
    assert_eq!(report["outcome"], "connected");

    let out = run(&[
        "path",
        "--builtin",
        "eq5-relu",
        "--class",
        "1",
        "--from=0,5",
        "--to=0.25,0.25",
    ]);
    let report = stdout_json(&out);
    assert_valid(&report, "path-report.schema.json");
    assert_eq!(report["outcome"], "disconnected");
}

#[test]
fn train_report_validates_and_network_file_round_trips() {
    let dir = tmp();
    let net_path = dir.path().join("trained.json");
    let hist_path = dir.path().join("hist.csv");
    let out = run(&[
        "train",
        "--generator",
        "strips",
        "--n",
        "40",
        "--widths",
        "4",
        "--epochs",
        "40",
        "--seed",
        "7",
        "--out",
        net_path.to_str().unwrap(),
        "--history",
        hist_path.to_str().unwrap(),
    ]);
    let report = stdout_json(&out);
    assert_valid(&report, "train-report.schema.json");
    assert_eq!(report["history"].as_array().unwrap().len(), 40);

    // emitted network reloads byte-equivalently
    let text = fs::read_to_string(&net_path).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_valid(&doc, "network.schema.json");
    let reloaded = decision_regions::net::load_network(&net_path).unwrap();
    assert_eq!(reloaded.to_json_string(), text);

    let hist = fs::read_to_string(&hist_path).unwrap();
    assert!(hist.starts_with("epoch,loss,errors\n"));
    assert_eq!(hist.lines().count(), 41);
}

#[test]
fn svg_output_is_deterministic_and_well_formed() {
    let dir = tmp();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let out = run(&[
            "connectivity",
            "--builtin",
            "eq5-relu",
            "--class",
            "1",
            "--json",
            dir.path().join("r.json").to_str().unwrap(),
            "--svg",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes_a = fs::read(&a).unwrap();
    let bytes_b = fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("<polygon"));
}

#[test]
fn precondition_failures_exit_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["certify", "--builtin", "no-such-net"],
        vec!["connectivity", "--builtin", "eq5-relu", "--class", "0"],
        vec!["connectivity", "--builtin", "eq5-relu", "--class", "3"],
        vec!["regions", "--builtin", "eq5-relu", "--box", "-1"],
        vec!["train", "--generator", "zebra"],
        vec![
            "path",
            "--builtin",
            "eq5-relu",
            "--class",
            "1",
            "--from=0,0,0",
            "--to=1,1",
        ],
        // (4,4) classifies to class 2, not class 1
        vec![
            "path",
            "--builtin",
            "eq5-relu",
            "--class",
            "1",
            "--from=4,4",
            "--to=0,0",
        ],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {:?}, stderr: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn non_piecewise_linear_regions_request_exits_2_but_certify_accepts() {
    let dir = tmp();
    let path = dir.path().join("elu.json");
    fs::write(
        &path,
        r#"{
  "input_dim": 2,
  "layers": [
    {
      "weights": [[1.0, 0.0], [0.0, 1.0]],
      "bias": [0.0, 0.0],
      "activation": { "kind": "elu" }
    }
  ],
  "output": { "weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0] }
}
"#,
    )
    .unwrap();
    let out = run(&["regions", "--network", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["certify", "--network", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn svg_on_non_planar_input_exits_2() {
    let dir = tmp();
    let path = dir.path().join("net3d.json");
    fs::write(
        &path,
        r#"{
  "input_dim": 3,
  "layers": [
    {
      "weights": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
      "bias": [0.0, 0.0],
      "activation": { "kind": "leaky_relu", "alpha": 0.2 }
    }
  ],
  "output": { "weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0] }
}
"#,
    )
    .unwrap();
    let svg = dir.path().join("x.svg");
    let out = run(&[
        "regions",
        "--network",
        path.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!svg.exists());
}

#[test]
fn json_flag_redirects_report_and_prints_summary() {
    let dir = tmp();
    let json = dir.path().join("cert.json");
    let out = run(&[
        "certify",
        "--builtin",
        "eq4-nonpyramidal",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict: no guarantee"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_valid(&report, "certify-report.schema.json");
}

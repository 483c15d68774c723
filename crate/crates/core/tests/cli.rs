//! End-to-end checks of the `aodkit` binary: exit codes, stream
//! separation, output layout, and byte determinism.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use common::{fixture_path, golden_path};

fn aodkit<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_aodkit"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is utf-8")
}

fn xmi() -> String {
    fixture_path("cheque_service.xmi").display().to_string()
}

fn config() -> String {
    fixture_path("concerns.cfg").display().to_string()
}

#[test]
fn help_exits_zero() {
    let out = aodkit(["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for subcommand in ["inspect", "analyze", "transform", "codegen"] {
        assert!(text.contains(subcommand), "help lists {subcommand}");
    }
}

#[test]
fn unknown_subcommand_is_a_user_error() {
    let out = aodkit(["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_file_is_a_user_error() {
    let out = aodkit(["inspect", "/nonexistent/model.xmi"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("/nonexistent/model.xmi"),
        "error names the offending path"
    );
    assert!(stdout(&out).is_empty(), "errors go to stderr only");
}

#[test]
fn malformed_config_is_a_user_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = dir.path().join("broken.cfg");
    std::fs::write(&bad, "threshold = \"many\"\n[concerns\n").expect("write");
    let out = aodkit(["inspect", &xmi(), "--config", &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unsupported_xmi_version_is_a_user_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let doc = dir.path().join("future.xmi");
    std::fs::write(
        &doc,
        "<?xml version=\"1.0\"?><XMI xmi.version=\"2.1\"><XMI.content/></XMI>",
    )
    .expect("write");
    let out = aodkit(["inspect", &doc.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2.1"), "error names the version");
}

#[test]
fn empty_model_inspects_cleanly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let doc = dir.path().join("empty.xmi");
    std::fs::write(
        &doc,
        "<?xml version=\"1.0\"?><XMI xmi.version=\"1.1\"><XMI.content></XMI.content></XMI>",
    )
    .expect("write");
    let out = aodkit(["inspect", &doc.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn inspect_prints_the_message_table() {
    let out = aodkit(["inspect", &xmi(), "--config", &config()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("block user"));
    assert!(text.contains("cheque service"));
    assert!(text.contains("non-functional"));
}

#[test]
fn inspect_survives_missing_object_table_with_warnings() {
    let single = fixture_path("single_message.xmi").display().to_string();
    let out = aodkit(["inspect", &single]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("block user"));
    assert!(
        stderr(&out).contains("not in object table"),
        "fallback resolution is reported as a warning"
    );
}

#[test]
fn analyze_reports_candidates_as_json() {
    let out = aodkit(["analyze", &xmi(), "--config", &config()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("analyze emits JSON");

    let classes: Vec<&str> = doc["report"]["candidates"]
        .as_array()
        .expect("candidate list")
        .iter()
        .map(|c| c["class"].as_str().expect("class name"))
        .collect();
    assert_eq!(classes, vec!["login page", "security"]);

    let repetitions = doc["repetitions"].as_array().expect("repetition list");
    assert_eq!(repetitions.len(), 4);
}

#[test]
fn analyze_with_high_threshold_finds_nothing() {
    let out = aodkit(["analyze", &xmi(), "--config", &config(), "--threshold", "99"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("analyze emits JSON");
    assert_eq!(doc["report"]["threshold"], 99);
    assert_eq!(doc["report"]["candidates"].as_array().map(Vec::len), Some(0));
}

#[test]
fn zero_threshold_is_rejected() {
    let out = aodkit(["analyze", &xmi(), "--config", &config(), "--threshold", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

fn expected_transform_files() -> [&'static str; 6] {
    [
        "aod_model.json",
        "coupling.json",
        "cheque service__ood.dot",
        "cheque service__aod.dot",
        "logging__ood.dot",
        "logging__aod.dot",
    ]
}

#[test]
fn transform_writes_model_coupling_and_diagrams() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("out");
    let out = aodkit([
        "transform",
        &xmi(),
        "--config",
        &config(),
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    for name in expected_transform_files() {
        assert!(out_dir.join(name).is_file(), "{name} must be written");
    }

    let coupling: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("coupling.json")).unwrap())
            .expect("coupling.json is JSON");
    assert_eq!(coupling["mode"], "distinct-classes");
    assert_eq!(coupling["totals"]["ood_total"], 14);
    assert_eq!(coupling["totals"]["aod_total"], 6);
    assert_eq!(coupling["delta"], 8);
    assert_eq!(coupling["per_class"]["home page"]["ood"]["fan_out"], 3);

    let model: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("aod_model.json")).unwrap())
            .expect("aod_model.json is JSON");
    let aspects = model["aspects"].as_array().expect("aspect list");
    let names: Vec<&str> = aspects.iter().map(|a| a["name"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["LoginPage", "Security"]);

    let text = stdout(&out);
    assert!(
        text.trim_end().ends_with("Totals: OOD 14, AOD 6, delta 8"),
        "coupling headline is the last stdout line, got: {text}"
    );
}

#[test]
fn transform_message_count_mode_is_selectable() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("out");
    let out = aodkit([
        "transform",
        &xmi(),
        "--config",
        &config(),
        "--coupling",
        "message-count",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let coupling: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("coupling.json")).unwrap())
            .expect("coupling.json is JSON");
    assert_eq!(coupling["mode"], "message-count");
    assert_eq!(coupling["totals"]["ood_total"], 22);
    assert_eq!(coupling["totals"]["aod_total"], 10);
    assert_eq!(coupling["delta"], 12);
}

#[test]
fn transform_with_high_threshold_is_the_identity() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("out");
    let out = aodkit([
        "transform",
        &xmi(),
        "--config",
        &config(),
        "--threshold",
        "99",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let coupling: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("coupling.json")).unwrap())
            .expect("coupling.json is JSON");
    assert_eq!(coupling["delta"], 0);
    assert_eq!(coupling["aspects"].as_array().map(Vec::len), Some(0));
    let model: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("aod_model.json")).unwrap())
            .expect("aod_model.json is JSON");
    assert_eq!(model["aspects"].as_array().map(Vec::len), Some(0));
    assert_eq!(
        model["base_messages"]["rows"].as_array().map(Vec::len),
        Some(22),
        "identity transform keeps all rows in the base"
    );
}

#[test]
fn transform_runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().expect("tempdir");
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for out_dir in [&first, &second] {
        let out = aodkit([
            "transform",
            &xmi(),
            "--config",
            &config(),
            "--out",
            &out_dir.display().to_string(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in expected_transform_files() {
        let a = std::fs::read(first.join(name)).expect("first run output");
        let b = std::fs::read(second.join(name)).expect("second run output");
        assert_eq!(a, b, "{name} must be byte-identical across runs");
    }
}

#[test]
fn unwritable_output_path_is_a_user_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let blocker = dir.path().join("occupied");
    std::fs::write(&blocker, "not a directory").expect("write");
    let out = aodkit([
        "transform",
        &xmi(),
        "--config",
        &config(),
        "--out",
        &blocker.join("nested").display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn codegen_matches_the_golden_units() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("gen");
    let out = aodkit([
        "codegen",
        &xmi(),
        "--config",
        &config(),
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let units = [
        "aspects/LoginPage.aj",
        "aspects/Security.aj",
        "classes/AccountDataBase.java",
        "classes/HomePage.java",
        "classes/OptionMenuPage.java",
        "manifest.json",
    ];
    for name in units {
        let generated = std::fs::read(out_dir.join(name))
            .unwrap_or_else(|e| panic!("{name} must be generated: {e}"));
        let golden = std::fs::read(golden_path(name)).expect("golden file");
        assert_eq!(generated, golden, "{name} must match the golden bytes");
    }
    assert!(
        stderr(&out).contains("customer"),
        "skipped actor is reported on stderr"
    );
}

#[test]
fn codegen_honors_custom_extensions() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("gen");
    let out = aodkit([
        "codegen",
        &xmi(),
        "--config",
        &config(),
        "--aspect-ext",
        "aspect",
        "--class-ext",
        "jav",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(out_dir.join("aspects/Security.aspect").is_file());
    assert!(out_dir.join("classes/HomePage.jav").is_file());
}

fn dot_path(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).expect("dot file")
}

#[test]
fn rendered_dot_files_validate_with_the_bundled_parser() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_dir = dir.path().join("out");
    let out = aodkit([
        "transform",
        &xmi(),
        "--config",
        &config(),
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    for name in expected_transform_files().into_iter().filter(|n| n.ends_with(".dot")) {
        let graph = aodkit::render::parse_dot(&dot_path(&out_dir, name))
            .unwrap_or_else(|e| panic!("{name} must validate: {e}"));
        if name.ends_with("__aod.dot") {
            let red: Vec<&str> = graph.red_nodes().iter().map(|n| n.id.as_str()).collect();
            assert_eq!(red, vec!["l-page:login page", "security"]);
        } else {
            assert!(graph.red_nodes().is_empty());
        }
    }
}

use std::path::{Path, PathBuf};

use ringscore_cli::calibration::CALIBRATION_VERSION;
use ringscore_cli::commands::{calibrate, score, synth};
use ringscore_cli::config::CONFIG_VERSION;
use ringscore_cli::scenario::SCENARIO_VERSION;
use ringscore_cli::{presets, run_bench, Config, ScoringMode};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema(name: &str) -> (Value, jsonschema::Validator) {
    let text = std::fs::read_to_string(root().join(format!("schemas/{name}.v1.json"))).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let v = jsonschema::validator_for(&doc).unwrap_or_else(|e| panic!("{name}: {e}"));
    (doc, v)
}

fn assert_valid(name: &str, instance: &Value) {
    let (_, v) = schema(name);
    let errors: Vec<String> = v
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn schema_versions_match_code() {
    for (name, version) in [
        ("config", CONFIG_VERSION),
        ("calibration", CALIBRATION_VERSION),
        ("scenario", SCENARIO_VERSION),
        ("session", score::SESSION_VERSION),
        ("bench", ringscore_cli::benchmark::BENCH_VERSION),
        ("ground_truth", synth::GROUND_TRUTH_VERSION),
    ] {
        let (doc, _) = schema(name);
        assert_eq!(doc["properties"]["version"]["const"], version, "{name}");
    }
}

#[test]
fn shipped_scenarios_validate() {
    for preset in presets::all() {
        let text = std::fs::read_to_string(root().join(format!("scenarios/{}.json", preset.name)))
            .unwrap();
        assert_valid("scenario", &json(&text));
    }
}

#[test]
fn pipeline_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = presets::easy(3);
    let truth = synth::synthesize(&scenario, scenario.seed, None, dir.path()).unwrap();
    assert_valid("ground_truth", &serde_json::to_value(&truth).unwrap());
    let config_text = std::fs::read_to_string(dir.path().join("config.json")).unwrap();
    assert_valid("config", &json(&config_text));
    let config = Config::from_json(&config_text).unwrap();
    let cal = calibrate::calibrate(&config, dir.path()).unwrap();
    assert_valid("calibration", &json(&cal.to_json()));
    let log = score::score(&config, dir.path(), Some(cal), ScoringMode::Rectified).unwrap();
    assert_valid("session", &json(&log.to_json()));
    assert_valid("config", &serde_json::to_value(&log.config).unwrap());
    let report = run_bench(&presets::easy(2), 1, None, ScoringMode::Masks).unwrap();
    assert_valid("bench", &json(&report.to_json()));
}

#[test]
fn schemas_reject_malformed_documents() {
    let (_, config) = schema("config");
    assert!(!config.is_valid(&json(r#"{"version": 1}"#)));
    assert!(!config.is_valid(&json(r#"{"version": 2, "cameras": []}"#)));
    assert!(!config.is_valid(&json(
        r#"{"version": 1, "cameras": [{"id": "a", "frames": [], "hints": []}], "scoring_mode": "fast"}"#
    )));
    let (_, bench) = schema("bench");
    let mut report = json(
        &run_bench(&presets::easy(1), 1, None, ScoringMode::Masks)
            .unwrap()
            .to_json(),
    );
    report["rows"][0]["accuracy"] = Value::from("100%");
    assert!(!bench.is_valid(&report));
}

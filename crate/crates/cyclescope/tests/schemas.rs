use std::path::PathBuf;

use cyclescope::commands::{
    cycles, dk_rows, eval_table, lk_rows, zero_report, CycleRequest, MethodChoice, SweepRequest,
};
use cyclescope::output::Format;
use cyclescope::sampling::task_spec;
use cyclescope::verify::{run_verify, Level};
use cyclescope::SpecFile;
use cyclescope_core::PerturbationSpec;
use jsonschema::JSONSchema;
use serde::Serialize;
use serde_json::Value;

fn schema(name: &str) -> JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft7)
        .compile(&value)
        .expect("schema compiles")
}

fn assert_conforms<T: Serialize>(schema_name: &str, value: &T) {
    let instance = serde_json::to_value(value).unwrap();
    let compiled = schema(schema_name);
    let messages: Vec<String> = match compiled.validate(&instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    assert!(messages.is_empty(), "{schema_name}: {messages:?}");
}

#[test]
fn spec_files_conform() {
    for spec in [
        PerturbationSpec::zero(0),
        PerturbationSpec::radial_linear(),
        PerturbationSpec::lambda_family(0.5),
        task_spec(3, 1, 5),
    ] {
        assert_conforms("spec.schema.json", &SpecFile::from_spec(&spec));
    }
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    for entry in std::fs::read_dir(data).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert!(schema("spec.schema.json").is_valid(&value));
    }
    let bad = serde_json::json!({"n": 1, "a": [[1, 0]]});
    assert!(!schema("spec.schema.json").is_valid(&bad));
}

#[test]
fn eval_output_conforms() {
    for method in [
        MethodChoice::Direct,
        MethodChoice::Reduced,
        MethodChoice::Both,
    ] {
        let req = SweepRequest {
            spec: task_spec(1, 0, 3),
            h_lo: 0.1,
            h_hi: 0.9,
            points: 4,
            method,
            format: Format::Json,
        };
        assert_conforms("eval.schema.json", &eval_table(&req).unwrap());
    }
}

#[test]
fn zero_reports_conform() {
    for spec in [
        PerturbationSpec::lambda_family(0.5),
        PerturbationSpec::zero(2),
        task_spec(2, 0, 4),
    ] {
        let report = zero_report(&spec, 0.01, 0.99, 200, MethodChoice::Direct).unwrap();
        assert_conforms("zeros.schema.json", &report);
    }
}

#[test]
fn cycle_report_conforms() {
    let req = CycleRequest {
        spec: PerturbationSpec::lambda_family(0.5),
        eps: 1e-3,
        h_lo: 0.05,
        h_hi: 0.95,
        points: 19,
        format: Format::Json,
    };
    assert_conforms("cycles.schema.json", &cycles(&req).unwrap());
}

#[test]
fn tables_conform() {
    assert_conforms(
        "lk-table.schema.json",
        &lk_rows(-3, 4, &[0.2, 0.7]).unwrap(),
    );
    assert_conforms("dk-table.schema.json", &dk_rows(None, 6).unwrap());
}

#[test]
fn verify_report_conforms() {
    let report = run_verify(7, Level::Quick);
    assert!(report.passed, "{}", report.render_text());
    assert_conforms("verify.schema.json", &report);
}

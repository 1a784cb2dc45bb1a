#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn config_path(name: &str) -> PathBuf {
    workspace_root().join("configs").join(name)
}

/// Runs the CLI binary and returns its raw output.
pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strictqst"))
        .args(args)
        .output()
        .expect("spawn strictqst")
}

/// Runs the CLI and panics with its stderr unless it exits successfully.
pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "strictqst {args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validates `instance` against `schemas/<name>.schema.json`.
pub fn assert_schema_valid(name: &str, instance: &Value) {
    let schema = read_json(&workspace_root().join("schemas").join(format!("{name}.schema.json")));
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} violations: {errors:?}");
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

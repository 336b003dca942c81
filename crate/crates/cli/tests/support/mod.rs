//! Scripted end-to-end runs of the `c7to8` binary.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const VALID: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<bpmn:definitions xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL" xmlns:camunda="http://camunda.org/schema/1.0/bpmn" id="D" targetNamespace="http://bpmn.io/schema/bpmn">
  <bpmn:process id="P" isExecutable="true">
    <bpmn:serviceTask id="Service-Task-2" name="DelegateExpression" camunda:delegateExpression="${SomeDelegateExpression}" />
  </bpmn:process>
</bpmn:definitions>
"#;

pub const MALFORMED: &str = "<bpmn:definitions xmlns:bpmn=\"http://www.omg.org/spec/BPMN/20100524/MODEL\"><bpmn:process>";

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_c7to8")
}

/// Runs the binary with `cwd` as working directory.
pub fn c7to8(cwd: &Path, args: &[&str]) -> Output {
    Command::new(bin()).current_dir(cwd).args(args).output().expect("spawn c7to8")
}

pub fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

pub fn names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

pub fn log_text(cwd: &Path) -> Option<String> {
    fs::read_to_string(cwd.join("logs/transformation.log")).ok()
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// The whole command-line contract; returns a summary or the first
/// violation.
pub fn check_cli_contract() -> Result<String, String> {
    // Single file: output beside the input, log under the working directory.
    let cwd = tempfile::tempdir().unwrap();
    let models = cwd.path().join("models");
    fs::create_dir(&models).unwrap();
    write(&models, "taxi.bpmn", VALID);
    let out = c7to8(cwd.path(), &["models/taxi.bpmn"]);
    ensure(out.status.code() == Some(0), format!("single file exit {:?}", out.status.code()))?;
    ensure(models.join("taxi-transformed.bpmn").is_file(), "taxi-transformed.bpmn missing")?;
    let log = log_text(cwd.path()).ok_or("logs/transformation.log missing")?;
    ensure(log.contains("MAPPING: bpmn:serviceTask with id=Service-Task-2"), "log lacks the mapping line")?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(stdout.contains(&log), "console output differs from log file")?;

    // Directory: all and only .bpmn files, earlier outputs excluded.
    let cwd = tempfile::tempdir().unwrap();
    let dir = cwd.path().join("in");
    fs::create_dir(&dir).unwrap();
    write(&dir, "a.bpmn", VALID);
    write(&dir, "b.BPMN", VALID);
    write(&dir, "notes.txt", "not a model");
    write(&dir, "old-transformed.bpmn", VALID);
    let out = c7to8(cwd.path(), &["in"]);
    ensure(out.status.code() == Some(0), format!("directory exit {:?}", out.status.code()))?;
    let expected = [
        "a-transformed.bpmn",
        "a.bpmn",
        "b-transformed.BPMN",
        "b.BPMN",
        "notes.txt",
        "old-transformed.bpmn",
    ];
    ensure(names(&dir) == expected, format!("directory contents {:?}", names(&dir)))?;
    let log = log_text(cwd.path()).ok_or("log missing after directory run")?;
    let headers: Vec<&str> = log.lines().filter(|l| l.starts_with("=== ")).collect();
    ensure(
        headers.len() == 2 && headers[0].contains("a.bpmn") && headers[1].contains("b.BPMN"),
        format!("log headers {headers:?}"),
    )?;

    // Second run: same inputs, outputs overwritten, log truncated.
    let out = c7to8(cwd.path(), &["in"]);
    ensure(out.status.code() == Some(0), "rerun exit code")?;
    ensure(names(&dir) == expected, "rerun converted a previous output")?;
    ensure(log_text(cwd.path()).as_deref() == Some(log.as_str()), "rerun log differs")?;

    // One malformed file: exit 1, the valid file is still converted.
    let cwd = tempfile::tempdir().unwrap();
    let dir = cwd.path().join("mixed");
    fs::create_dir(&dir).unwrap();
    write(&dir, "bad.bpmn", MALFORMED);
    write(&dir, "good.bpmn", VALID);
    let out = c7to8(cwd.path(), &["mixed"]);
    ensure(out.status.code() == Some(1), format!("mixed exit {:?}", out.status.code()))?;
    ensure(dir.join("good-transformed.bpmn").is_file(), "valid file not converted")?;
    ensure(!dir.join("bad-transformed.bpmn").exists(), "output written for malformed file")?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(stdout.contains("bad.bpmn: FAILED"), "malformed file not reported")?;

    // Usage errors: exit 2 and no log file.
    let cwd = tempfile::tempdir().unwrap();
    let out = c7to8(cwd.path(), &["missing.bpmn"]);
    ensure(out.status.code() == Some(2), format!("missing path exit {:?}", out.status.code()))?;
    ensure(log_text(cwd.path()).is_none(), "log written for a usage error")?;
    let out = c7to8(cwd.path(), &[]);
    ensure(out.status.code() == Some(2), "no arguments exit code")?;
    let out = c7to8(cwd.path(), &["--bogus", "x"]);
    ensure(out.status.code() == Some(2), "unknown flag exit code")?;

    // Only previous outputs: warning, exit 0.
    let cwd = tempfile::tempdir().unwrap();
    write(cwd.path(), "x-transformed.bpmn", VALID);
    let out = c7to8(cwd.path(), &["."]);
    ensure(out.status.code() == Some(0), "empty directory exit code")?;
    ensure(String::from_utf8_lossy(&out.stderr).contains("warning"), "empty directory warning")?;

    Ok("single file, directory, rerun, malformed, usage and empty-directory cases".into())
}

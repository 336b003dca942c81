//! Batch driver for the converter: input discovery, output naming, the
//! per-file pipeline and the transformation log file.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use c7to8_core::{
    convert, render_section, Severity, TransformOptions, TransformStatus, DEFAULT_PLATFORM_VERSION,
};
use c7to8_core::translog::section_header;
use rayon::prelude::*;

/// Log file location, relative to the working directory.
pub const LOG_FILE: &str = "logs/transformation.log";
const SUFFIX: &str = "-transformed";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub platform_version: String,
    pub parallel: bool,
    pub timestamps: bool,
    pub recursive: bool,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        Self {
            input_path: input_path.into(),
            platform_version: DEFAULT_PLATFORM_VERSION.to_string(),
            parallel: true,
            timestamps: false,
            recursive: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("path not found: {}", .0.display())]
    PathNotFound(PathBuf),
    #[error("no .bpmn files found in {}", .0.display())]
    EmptyDirectory(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::EmptyDirectory(_) => EXIT_OK,
            CliError::PathNotFound(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }
}

/// Inputs for `path`, non-recursive. See [`discover_inputs_with`].
pub fn discover_inputs(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    discover_inputs_with(path, false)
}

/// A file is its own single input, whatever its extension. A directory
/// yields its `.bpmn` files (case-insensitive), sorted, excluding earlier
/// `-transformed.bpmn` outputs; `recursive` includes subdirectories.
pub fn discover_inputs_with(path: &Path, recursive: bool) -> Result<Vec<PathBuf>, CliError> {
    if !path.exists() {
        return Err(CliError::PathNotFound(path.to_path_buf()));
    }
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let walker = walkdir::WalkDir::new(path)
        .min_depth(1)
        .max_depth(if recursive { usize::MAX } else { 1 })
        .sort_by_file_name();
    let mut inputs = Vec::new();
    for entry in walker {
        let entry = entry.map_err(|e| CliError::Io {
            path: e.path().unwrap_or(path).to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && is_bpmn_input(entry.path()) {
            inputs.push(entry.into_path());
        }
    }
    inputs.sort();
    if inputs.is_empty() {
        return Err(CliError::EmptyDirectory(path.to_path_buf()));
    }
    Ok(inputs)
}

fn is_bpmn_input(path: &Path) -> bool {
    let ext_ok = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("bpmn"));
    let stem_ok = path
        .file_stem()
        .and_then(|s| s.to_str())
        .map_or(true, |s| !s.ends_with(SUFFIX));
    ext_ok && stem_ok
}

/// Sibling path with `-transformed` before the last extension.
pub fn output_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().unwrap_or(input.as_os_str());
    let mut name = OsString::from(stem);
    name.push(SUFFIX);
    if let Some(ext) = input.extension() {
        name.push(".");
        name.push(ext);
    }
    input.with_file_name(name)
}

/// Result of one input file.
#[derive(Debug, Clone)]
pub struct FileOutcome {
    pub input: PathBuf,
    /// Written output; `None` when the input could not be converted.
    pub output: Option<PathBuf>,
    pub status: TransformStatus,
    pub elements: usize,
    pub mapped: usize,
    pub todos: usize,
    pub optional_todos: usize,
    pub validation_errors: usize,
    pub overwritten: bool,
    pub error: Option<String>,
    /// Rendered log section for this file.
    pub section: String,
}

impl FileOutcome {
    pub fn summary_line(&self) -> String {
        match (&self.output, &self.error) {
            (Some(out), _) => format!(
                "{} -> {}: {} elements, {} mapped, {} TODO, {} TODO (OPTIONAL), {} validation errors",
                self.input.display(),
                out.display(),
                self.elements,
                self.mapped,
                self.todos,
                self.optional_todos,
                self.validation_errors
            ),
            (None, error) => format!(
                "{}: FAILED ({})",
                self.input.display(),
                error.as_deref().unwrap_or("unknown error")
            ),
        }
    }
}

fn stamp() -> String {
    chrono::Local::now().format("%Y-%m-%dT%H:%M:%S%.3f").to_string()
}

fn process(input: &Path, config: &RunConfig) -> FileOutcome {
    let options = TransformOptions {
        platform_version: config.platform_version.clone(),
    };
    let stamp_fn: &dyn Fn() -> String = &stamp;
    let stamp = config.timestamps.then_some(stamp_fn);
    let bytes = match fs::read(input) {
        Ok(bytes) => bytes,
        Err(e) => {
            let error = format!("cannot read input: {e}");
            return FileOutcome {
                input: input.to_path_buf(),
                output: None,
                status: TransformStatus::Failed,
                elements: 0,
                mapped: 0,
                todos: 0,
                optional_todos: 0,
                validation_errors: 0,
                overwritten: false,
                section: format!("{}\nTODO: {error}\n", section_header(input)),
                error: Some(error),
            }
        }
    };
    let conversion = convert(&bytes, input, &options);
    let report = &conversion.report;
    let mut outcome = FileOutcome {
        input: input.to_path_buf(),
        output: None,
        status: report.status,
        elements: report.counters.elements_visited,
        mapped: report.counters.elements_mapped,
        todos: report.counters.todos,
        optional_todos: report.counters.optional_todos,
        validation_errors: conversion
            .findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count(),
        overwritten: false,
        error: None,
        section: render_section(report, stamp),
    };
    match &conversion.output {
        None => {
            outcome.error = report.entries.first().map(|e| e.to_string());
        }
        Some(bytes) => {
            let out = output_path(input);
            outcome.overwritten = out.exists();
            match write_atomically(&out, bytes) {
                Ok(()) => outcome.output = Some(out),
                Err(e) => {
                    outcome.status = TransformStatus::Failed;
                    outcome.error = Some(format!("cannot write {}: {e}", out.display()));
                }
            }
        }
    }
    outcome
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Outcome of a whole run.
#[derive(Debug)]
pub struct RunReport {
    pub exit_code: i32,
    pub files: Vec<FileOutcome>,
}

/// Runs the batch with `cwd` as the base of the log file. Console output
/// goes to `out`, diagnostics to `err`.
pub fn run_in(config: &RunConfig, cwd: &Path, out: &mut dyn Write, err: &mut dyn Write) -> RunReport {
    let inputs = match discover_inputs_with(&config.input_path, config.recursive) {
        Ok(inputs) => inputs,
        Err(e) => {
            let label = if e.exit_code() == EXIT_OK { "warning" } else { "error" };
            let _ = writeln!(err, "{label}: {e}");
            return RunReport {
                exit_code: e.exit_code(),
                files: Vec::new(),
            };
        }
    };

    let files: Vec<FileOutcome> = if config.parallel {
        inputs.par_iter().map(|p| process(p, config)).collect()
    } else {
        inputs.iter().map(|p| process(p, config)).collect()
    };

    let log_path = cwd.join(LOG_FILE);
    let mut log = match open_log(&log_path) {
        Ok(file) => Some(file),
        Err(e) => {
            let _ = writeln!(err, "warning: cannot write transformation log {}: {e}", log_path.display());
            None
        }
    };
    for file in &files {
        let _ = out.write_all(file.section.as_bytes());
        if let Some(f) = log.as_mut() {
            if let Err(e) = f.write_all(file.section.as_bytes()) {
                let _ = writeln!(err, "warning: cannot write transformation log {}: {e}", log_path.display());
                log = None;
            }
        }
    }
    if let Some(mut f) = log {
        if let Err(e) = f.flush() {
            let _ = writeln!(err, "warning: cannot write transformation log {}: {e}", log_path.display());
        }
    }
    for file in &files {
        if file.overwritten {
            let _ = writeln!(out, "overwrote existing {}", file.output.as_deref().unwrap_or(&file.input).display());
        }
        let _ = writeln!(out, "{}", file.summary_line());
    }

    let exit_code = if files.iter().any(|f| f.status == TransformStatus::Failed) {
        EXIT_PARSE_FAILURE
    } else {
        EXIT_OK
    };
    RunReport { exit_code, files }
}

fn open_log(path: &Path) -> io::Result<io::BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(path).map(io::BufWriter::new)
}

/// Runs the batch against the process working directory and standard
/// streams; returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let cwd = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_in(config, &cwd, &mut stdout.lock(), &mut stderr.lock()).exit_code
}

use std::path::PathBuf;
use std::process::ExitCode;

use c7to8_cli::{run, RunConfig};
use clap::Parser;

/// Converts Camunda 7 BPMN models into Camunda 8 models.
#[derive(Debug, Parser)]
#[command(name = "c7to8", version)]
struct Args {
    /// A .bpmn file, or a directory whose .bpmn files are converted.
    path: PathBuf,
    /// Value for modeler:executionPlatformVersion in the output.
    #[arg(long, default_value = c7to8_core::DEFAULT_PLATFORM_VERSION)]
    platform_version: String,
    /// Include subdirectories when PATH is a directory.
    #[arg(long)]
    recursive: bool,
    /// Convert files one after another.
    #[arg(long)]
    no_parallel: bool,
    /// Prefix log lines with a timestamp.
    #[arg(long)]
    timestamps: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        input_path: args.path,
        platform_version: args.platform_version,
        parallel: !args.no_parallel,
        timestamps: args.timestamps,
        recursive: args.recursive,
    };
    ExitCode::from(run(&config) as u8)
}

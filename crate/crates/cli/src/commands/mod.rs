//! One module per subcommand. Each returns `CliResult<()>` and leaves exit
//! codes to the caller.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cli::{Cli, Command, GlobalOpts};
use crate::config::ExperimentConfig;
use crate::exit::{CliError, CliResult};
use crate::io::{to_json_bytes, write_atomic};

pub mod classes;
pub mod classify;
pub mod compare;
pub mod demo;
pub mod distort;
pub mod estimate;
pub mod simulate;

pub const THREADS_VAR: &str = "SONAR_KNOT_THREADS";

/// Size the global rayon pool from `SONAR_KNOT_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("{THREADS_VAR}=`{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(CliError::failure)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if let Some(tol) = g.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::config(format!("--tol {tol} must be positive")));
        }
    }
    match cli.command {
        Command::Simulate { config } => simulate::run(g, &config),
        Command::Distort(args) => distort::run(g, &args),
        Command::Estimate(args) => estimate::run(g, &args),
        Command::Classes { degrees } => classes::run(g, &degrees),
        Command::Compare(args) => compare::run(g, &args),
        Command::Classify(args) => classify::run(g, &args),
        Command::DemoFigures => demo::run(g),
    }
}

/// Print a JSON report to stdout and, with `--out`, also write it there.
pub(crate) fn emit_report<S: Serialize>(g: &GlobalOpts, report: &S) -> CliResult<()> {
    let bytes = to_json_bytes(report)?;
    if let Some(path) = &g.out {
        write_atomic(path, &bytes)?;
    }
    std::io::stdout().lock().write_all(&bytes)?;
    Ok(())
}

/// `--out`, else the config's output directory, else `fallback`.
pub(crate) fn output_dir(g: &GlobalOpts, cfg: Option<&ExperimentConfig>, fallback: &str) -> PathBuf {
    g.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.as_ref()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(fallback))
}

pub(crate) fn load_config(path: &Path) -> CliResult<(ExperimentConfig, Vec<u8>)> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::config(format!("config {} is not UTF-8: {e}", path.display())))?;
    Ok((ExperimentConfig::from_json(text)?, bytes))
}

pub(crate) fn validated<S: Serialize>(schema_src: &str, report: &S) -> CliResult<serde_json::Value> {
    let doc = serde_json::to_value(report).map_err(CliError::failure)?;
    let errors = crate::schema::validate_str(schema_src, &doc);
    if !errors.is_empty() {
        return Err(CliError::failure(format!(
            "report violates its schema:\n  {}",
            errors.join("\n  ")
        )));
    }
    Ok(doc)
}

pub(crate) fn energy(sig: &sonarknot::Signature) -> f64 {
    sig.values().iter().map(|v| v.norm_sqr()).sum()
}

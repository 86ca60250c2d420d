//! Experiment runner behind the `adiabatica` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{Command, ExperimentConfig, Format};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(adiabatica_core::Error),
    #[error("{0}")]
    Failed(adiabatica_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Invalid(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Failed(adiabatica_core::Error::InvalidParameter(_) | adiabatica_core::Error::InvalidGrid(_)) => 2,
            RunError::Failed(_) | RunError::Io { .. } => 1,
        }
    }
}

impl From<adiabatica_core::Error> for RunError {
    fn from(e: adiabatica_core::Error) -> Self {
        if e.is_numerical() {
            RunError::Numerical(e)
        } else {
            RunError::Failed(e)
        }
    }
}

/// Command-line overrides of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub verbose: bool,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    config::parse(&text).map_err(RunError::Invalid)
}

/// Validates, runs and writes the report; returns where it went.
pub fn execute(cfg: &ExperimentConfig, command: Command, overrides: &Overrides) -> Result<Option<PathBuf>, RunError> {
    let violations = cfg.validate(Some(command));
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    if overrides.verbose {
        let (t0, t1, steps) = cfg.grid_bounds();
        let model = cfg.model.map(|m| m.to_string()).unwrap_or_else(|| "rotating".into());
        eprintln!("adiabatica: {command} on {model}, grid [{t0}, {t1}] with {steps} steps");
    }
    let start = std::time::Instant::now();
    let report = commands::run(cfg, command)?;
    let format = overrides.format.or(cfg.format).unwrap_or_default();
    let target = overrides.output.clone().or_else(|| cfg.output.clone());
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    match &target {
        Some(path) => {
            let mut buf = Vec::new();
            report.write(format, &mut buf).map_err(io_err(path))?;
            fs::write(path, buf).map_err(io_err(path))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(format, &mut lock).and_then(|_| lock.flush()).map_err(io_err(Path::new("<stdout>")))?;
        }
    }
    if overrides.verbose {
        eprintln!("adiabatica: done in {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(target)
}

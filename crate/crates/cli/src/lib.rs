//! Command-line front end for `flatsol-core`: config files, presets, reports,
//! CSV tables and SVG plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod report;
pub mod svg;

use std::fs;
use std::path::Path;

use config::RunConfig;
use error::CliError;

/// Where a run's configuration comes from.
pub enum Source<'a> {
    File(&'a Path),
    Preset(&'a str),
}

/// Loads a configuration and applies `--mesh` and `--tol` overrides.
pub fn load(source: Source, mesh: Option<usize>, tols: &[String]) -> Result<RunConfig, CliError> {
    let text = match source {
        Source::File(p) => fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))?,
        Source::Preset(name) => presets::lookup(name)
            .ok_or_else(|| CliError::Usage(format!("unknown preset '{name}' (known: {})", presets::names().join(", "))))?
            .to_string(),
    };
    let mut cfg = RunConfig::from_text(&text)?;
    if let Some(n) = mesh {
        cfg.mesh.n = n;
        cfg.mesh.ny = n;
    }
    apply_tols(&mut cfg.tol, tols)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn apply_tols(tol: &mut config::Tolerances, tols: &[String]) -> Result<(), CliError> {
    for t in tols {
        let (name, value) = t.split_once('=').ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VAL, got '{t}'")))?;
        tol.set(name.trim(), value.trim())?;
    }
    Ok(())
}

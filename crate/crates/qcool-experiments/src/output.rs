//! CSV and JSON writers shared by the experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{ExperimentError, Result};

/// Formats with 12 significant digits, in positional notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// The resolved config as `#`-prefixed lines.
pub fn config_header(config: &RunConfig) -> String {
    let mut out = String::new();
    for line in config.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    out
}

/// CSV text with the config header, one header row and the given rows.
pub fn csv_text(config: &RunConfig, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = config_header(config);
    out.push_str(&columns.join(","));
    out.push('\n');
    for r in rows {
        debug_assert_eq!(r.len(), columns.len());
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A JSON document with the resolved config embedded under `"config"`.
#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json_text<T: Serialize>(config: &RunConfig, body: &T) -> String {
    let mut s =
        serde_json::to_string_pretty(&WithConfig { config, body }).expect("report serializes");
    s.push('\n');
    s
}

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::sim::Sample;

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::usage(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// CSV with header `t,x1,...,xn`, numbers to 17 significant digits.
pub fn write_trajectory(path: &Path, samples: &[Sample], dimension: usize) -> Result<(), CliError> {
    ensure_parent(path)?;
    let err = |e: csv::Error| CliError::usage(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=dimension).map(|i| format!("x{i}")))
        .collect();
    w.write_record(&header).map_err(err)?;
    for s in samples {
        let row = std::iter::once(s.t).chain(s.x.iter().copied()).map(|v| format!("{v:.16e}"));
        w.write_record(row).map_err(err)?;
    }
    w.flush()
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

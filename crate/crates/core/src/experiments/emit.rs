//! Writes reports as CSV tables (one file per table, header always present)
//! or as a single JSON document.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::config::OutputFormat;
use crate::experiments::report::{Report, Tabular};

/// CSV text for a table, header first.
pub fn csv_string<R: Tabular>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(R::HEADER).map_err(ser)?;
    for row in rows {
        w.write_record(row.record()).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn table<R: Tabular>(
    dir: &Path,
    stem: &str,
    name: &str,
    rows: &Option<Vec<R>>,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    if let Some(rows) = rows {
        write(dir.join(format!("{stem}_{name}.csv")), &csv_string(rows)?, written)?;
    }
    Ok(())
}

/// Writes `report` under `dir` and returns the files written.
pub fn emit(report: &Report, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = report.scenario.name();
    let mut written = Vec::new();
    match format {
        OutputFormat::Json => {
            let text = serde_json::to_string_pretty(report).map_err(|e| Error::Serialize(e.to_string()))?;
            write(dir.join(format!("{stem}.json")), &(text + "\n"), &mut written)?;
        }
        OutputFormat::Csv => {
            table(dir, stem, "moments", &report.moments, &mut written)?;
            table(dir, stem, "distributions", &report.distributions, &mut written)?;
            table(dir, stem, "kernel", &report.kernel, &mut written)?;
            table(dir, stem, "bridge", &report.bridge, &mut written)?;
            table(dir, stem, "polya", &report.polya, &mut written)?;
            table(dir, stem, "oracle", &report.oracle, &mut written)?;
            table(dir, stem, "counts", &report.counts, &mut written)?;
            table(dir, stem, "prime_average", &report.prime_average, &mut written)?;
            table(dir, stem, "bias", &report.bias, &mut written)?;
            table(dir, stem, "sweep", &report.sweep, &mut written)?;
            for h in &report.histograms {
                let path = dir.join(format!("{stem}_hist_{}.csv", h.name));
                write(path, &csv_string(&h.bins)?, &mut written)?;
            }
        }
    }
    Ok(written)
}

//! Table files.
//!
//! JSON (canonical, carries provenance):
//!
//! ```json
//! {
//!   "meta": { "delta": 0.2, "family": { "kind": "canonical" }, "n_max": 30, "format_version": 1 },
//!   "rows": [[1, -0.25066282746310002], ...]
//! }
//! ```
//!
//! CSV: header `N,I`, one row per `N`, values at 17 significant digits, LF
//! line endings. CSV carries no provenance.

use std::fs;
use std::path::Path;

use integral_balance::{CoefficientFamily, IntegralTable};
use serde::{Deserialize, Serialize};

use crate::{fmt_f64, CliError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    /// From a file extension, if recognised.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct TableFile {
    meta: Meta,
    rows: Vec<(u64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    delta: Option<f64>,
    family: Option<CoefficientFamily>,
    n_max: u64,
    format_version: u32,
}

/// Pretty-printed JSON with one `[N, I]` row per line.
pub fn to_json(table: &IntegralTable) -> String {
    let meta = Meta {
        delta: table.delta(),
        family: table.family(),
        n_max: table.n_max(),
        format_version: FORMAT_VERSION,
    };
    let meta = serde_json::to_string_pretty(&meta).expect("table meta serializes");
    let mut out = format!("{{\n  \"meta\": {},\n  \"rows\": [\n", meta.replace('\n', "\n  "));
    let last = table.rows().len() - 1;
    for (i, row) in table.rows().iter().enumerate() {
        out.push_str("    ");
        out.push_str(&serde_json::to_string(row).expect("row serializes"));
        out.push_str(if i == last { "\n" } else { ",\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn from_json(text: &str) -> Result<IntegralTable, CliError> {
    let file: TableFile =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed table JSON: {e}")))?;
    if file.meta.format_version != FORMAT_VERSION {
        return Err(CliError::Usage(format!(
            "unsupported table format_version {}",
            file.meta.format_version
        )));
    }
    if file.meta.n_max != file.rows.len() as u64 {
        return Err(CliError::Usage(format!(
            "table meta says n_max = {} but has {} rows",
            file.meta.n_max,
            file.rows.len()
        )));
    }
    Ok(IntegralTable::from_rows(file.rows, file.meta.delta, file.meta.family)?)
}

pub fn to_csv(table: &IntegralTable) -> String {
    let mut out = String::from("N,I\n");
    for &(n, v) in table.rows() {
        out.push_str(&format!("{n},{}\n", fmt_f64(v)));
    }
    out
}

pub fn from_csv(text: &str) -> Result<IntegralTable, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(str::trim) {
        Some("N,I") => {}
        other => return Err(CliError::Usage(format!("expected CSV header `N,I`, got {other:?}"))),
    }
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || CliError::Usage(format!("malformed CSV row {}: {line:?}", i + 1));
            let (n, v) = line.split_once(',').ok_or_else(bad)?;
            Ok((n.trim().parse::<u64>().map_err(|_| bad())?, v.trim().parse::<f64>().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(IntegralTable::from_rows(rows, None, None)?)
}

pub fn render(table: &IntegralTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => to_csv(table),
        TableFormat::Json => to_json(table),
    }
}

pub fn save(table: &IntegralTable, path: &Path, format: TableFormat) -> Result<(), CliError> {
    fs::write(path, render(table, format)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a table, choosing the format by extension and falling back to
/// sniffing the first character.
pub fn load(path: &Path) -> Result<IntegralTable, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let format = TableFormat::from_path(path).unwrap_or_else(|| {
        if text.trim_start().starts_with('{') {
            TableFormat::Json
        } else {
            TableFormat::Csv
        }
    });
    match format {
        TableFormat::Json => from_json(&text),
        TableFormat::Csv => from_csv(&text),
    }
}

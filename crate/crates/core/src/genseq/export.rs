use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::generate::GeneratedSequence;
use crate::climdata::{Variable, WeatherTable, TIMESTAMP_FORMAT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    /// One CSV with provenance comment lines.
    Csv,
    /// One `(timestamp, value)` CSV per variable in a directory.
    Plotdata,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn table_rows(out: &mut String, table: &WeatherTable, columns: &[Variable]) {
    out.push_str("timestamp");
    for v in columns {
        out.push(',');
        out.push_str(v.name());
    }
    out.push('\n');
    for (i, t) in table.timestamps.iter().enumerate() {
        let _ = write!(out, "{}", t.format(TIMESTAMP_FORMAT));
        for v in columns {
            out.push(',');
            out.push_str(&cell(table.get(*v, i)));
        }
        out.push('\n');
    }
}

/// Table as CSV text in the export dialect, preceded by `# ` comment lines.
pub fn table_to_csv(table: &WeatherTable, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    table_rows(&mut out, table, &table.variables());
    out
}

/// Writes one `<variable>.csv` per column into `dir`.
pub fn table_plotdata(table: &WeatherTable, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for v in table.variables() {
        let mut out = String::new();
        table_rows(&mut out, table, &[v]);
        let path = dir.join(format!("{v}.csv"));
        fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// CSV text of a sequence: provenance comments, header, one row per step.
pub fn to_csv_string(seq: &GeneratedSequence) -> Result<String> {
    let p = &seq.provenance;
    let mut out = String::new();
    let _ = writeln!(out, "# generator: {}", p.software_version);
    let _ = writeln!(out, "# site: {}", serde_json::to_string(&p.plan.site)?);
    let _ = writeln!(out, "# plan: {}", serde_json::to_string(&p.plan)?);
    for m in &p.models {
        let _ = writeln!(out, "# model: {} = {}", m.variable, m.source);
    }
    for d in &p.decisions {
        let _ = writeln!(out, "# decision: {d}");
    }
    for n in &p.notes {
        let _ = writeln!(out, "# note: {n}");
    }
    let _ = writeln!(out, "# coherence: {}", serde_json::to_string(&p.coherence)?);
    // columns follow the variable declaration order
    let columns = seq.table.variables();
    table_rows(&mut out, &seq.table, &columns);
    Ok(out)
}

pub fn export_csv(seq: &GeneratedSequence, path: &Path) -> Result<()> {
    fs::write(path, to_csv_string(seq)?).map_err(|e| Error::io(path, e))
}

/// Writes `<variable>.csv` files into `dir` and returns their paths.
pub fn export_plotdata(seq: &GeneratedSequence, dir: &Path) -> Result<Vec<PathBuf>> {
    table_plotdata(&seq.table, dir)
}

/// Writes the sequence to `path` (a file for CSV, a directory for plotdata).
pub fn export(seq: &GeneratedSequence, format: ExportFormat, path: &Path) -> Result<Vec<PathBuf>> {
    match format {
        ExportFormat::Csv => export_csv(seq, path).map(|_| vec![path.to_path_buf()]),
        ExportFormat::Plotdata => export_plotdata(seq, path),
    }
}

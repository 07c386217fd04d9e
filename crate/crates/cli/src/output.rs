//! Output writers. Every run produces a CSV data file with a `#` header
//! block (tool, command, config hash, column names, units), optionally a
//! JSON mirror carrying the same numbers, and a run manifest. The
//! manifest is the only file that records wall time, so data files from
//! identical configurations are byte-identical run to run.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

/// One table cell. Numbers print in shortest round-trip form so the CSV
/// and the JSON mirror carry identical values.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Real(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(v) => write!(f, "{v}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

/// A finished result table ready to be written.
pub struct DataTable {
    pub command: &'static str,
    pub model: String,
    pub columns: Vec<String>,
    /// One unit tag per column (`1` marks a dimensionless count or flag).
    pub units: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra header lines (for example path vertex positions).
    pub notes: Vec<String>,
}

impl DataTable {
    pub fn new(command: &'static str, model: &str) -> Self {
        DataTable {
            command,
            model: model.to_string(),
            columns: Vec::new(),
            units: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn column(mut self, name: impl Into<String>, unit: &'static str) -> Self {
        self.columns.push(name.into());
        self.units.push(unit);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self, config_hash: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# decoprobe {}\n", self.command));
        out.push_str(&format!("# config {config_hash}\n"));
        out.push_str(&format!("# model {}\n", self.model));
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        out.push_str(&format!("# columns {}\n", self.columns.join(",")));
        let units: Vec<String> = self
            .columns
            .iter()
            .zip(&self.units)
            .map(|(c, u)| format!("{c}:{u}"))
            .collect();
        out.push_str(&format!("# units {}\n", units.join(",")));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct JsonMirror<'a> {
    tool: &'static str,
    command: &'static str,
    config_hash: &'a str,
    model: &'a str,
    notes: &'a [String],
    columns: &'a [String],
    units: &'a [&'static str],
    rows: &'a [Vec<Cell>],
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config_hash: &'a str,
    wall_time_ms: u128,
    config: &'a RunConfig,
}

/// Paths produced by one run.
pub struct WrittenFiles {
    pub data: PathBuf,
    pub mirror: Option<PathBuf>,
    pub manifest: PathBuf,
}

/// Write the table under the output stem: `<stem>.csv`, optionally
/// `<stem>.json`, and `<stem>.manifest.json` alongside.
pub fn write_table(
    stem: &Path,
    table: &DataTable,
    config: &RunConfig,
    config_hash: &str,
    json_mirror: bool,
    wall_time_ms: u128,
) -> std::io::Result<WrittenFiles> {
    if let Some(parent) = stem.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let data = stem.with_extension("csv");
    fs::File::create(&data)?.write_all(table.csv(config_hash).as_bytes())?;

    let mirror = if json_mirror {
        let path = stem.with_extension("json");
        let payload = JsonMirror {
            tool: "decoprobe",
            command: table.command,
            config_hash,
            model: &table.model,
            notes: &table.notes,
            columns: &table.columns,
            units: &table.units,
            rows: &table.rows,
        };
        let mut text = serde_json::to_string_pretty(&payload).expect("mirror serializes");
        text.push('\n');
        fs::File::create(&path)?.write_all(text.as_bytes())?;
        Some(path)
    } else {
        None
    };

    let manifest_path = manifest_path(stem);
    let manifest = Manifest {
        tool: "decoprobe",
        version: env!("CARGO_PKG_VERSION"),
        command: table.command,
        config_hash,
        wall_time_ms,
        config,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::File::create(&manifest_path)?.write_all(text.as_bytes())?;

    Ok(WrittenFiles {
        data,
        mirror,
        manifest: manifest_path,
    })
}

fn manifest_path(stem: &Path) -> PathBuf {
    let mut name = stem
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    name.push_str(".manifest.json");
    stem.with_file_name(name)
}

//! Self-describing report files.
//!
//! Every JSON report has a `meta` object and every CSV starts with a
//! `# key=value ...` comment line carrying the same fields. Nothing
//! time-dependent is written, so identical runs give identical bytes.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "ecgspike";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub mode: String,
}

impl Meta {
    pub fn new(command: &str, seed: u64, mode: impl Into<String>) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            mode: mode.into(),
        }
    }

    pub fn csv_comment(&self) -> String {
        format!(
            "# tool={} version={} command={} seed={} mode={}\n",
            self.tool, self.version, self.command, self.seed, self.mode
        )
    }
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Pretty JSON object with a `meta` key merged into `body`'s fields.
pub fn write_json<T: Serialize>(path: &Path, meta: &Meta, body: &T) -> Result<()> {
    let mut map = serde_json::Map::new();
    map.insert("meta".into(), serde_json::to_value(meta)?);
    match serde_json::to_value(body)? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    write_text(
        path,
        &(serde_json::to_string_pretty(&Value::Object(map))? + "\n"),
    )
}

/// CSV with a metadata comment line, a header and one row per record.
pub fn write_csv<I, R>(path: &Path, meta: &Meta, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let body = String::from_utf8(writer.into_inner().context("flushing CSV")?)?;
    write_text(path, &(meta.csv_comment() + &body))
}

/// Read a CSV written by [`write_csv`]: header plus string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| Ok(r?.iter().map(str::to_string).collect()))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Fixed-precision float for reports.
pub fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

//! Directory-level loading of WFDB (`.hea`/`.dat`/`.atr`) or CSV records.

use std::fs;
use std::path::{Path, PathBuf};

use super::{annotation, csv, wfdb, EcgRecord};
use crate::error::{Error, Result};

/// The 48 records of the MIT-BIH Arrhythmia Database.
pub const MITBIH_RECORDS: [&str; 48] = [
    "100", "101", "102", "103", "104", "105", "106", "107", "108", "109", "111", "112", "113",
    "114", "115", "116", "117", "118", "119", "121", "122", "123", "124", "200", "201", "202",
    "203", "205", "207", "208", "209", "210", "212", "213", "214", "215", "217", "219", "220",
    "221", "222", "223", "228", "230", "231", "232", "233", "234",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordSource {
    Wfdb { dir: PathBuf, id: String },
    Csv { dir: PathBuf, id: String },
}

impl RecordSource {
    pub fn id(&self) -> &str {
        match self {
            Self::Wfdb { id, .. } | Self::Csv { id, .. } => id,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Records found in `dir`, sorted by id. WFDB wins when both forms exist.
pub fn discover(dir: &Path) -> Result<Vec<RecordSource>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut wfdb_ids = Vec::new();
    let mut csv_ids = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(id) = name.strip_suffix(".hea") {
            wfdb_ids.push(id.to_string());
        } else if let Some(id) = name.strip_suffix(".csv") {
            if !id.ends_with(".ann") {
                csv_ids.push(id.to_string());
            }
        }
    }
    csv_ids.retain(|id| !wfdb_ids.contains(id));
    let mut out: Vec<_> = wfdb_ids
        .into_iter()
        .map(|id| RecordSource::Wfdb {
            dir: dir.to_path_buf(),
            id,
        })
        .chain(csv_ids.into_iter().map(|id| RecordSource::Csv {
            dir: dir.to_path_buf(),
            id,
        }))
        .collect();
    out.sort_by(|a, b| a.id().cmp(b.id()));
    Ok(out)
}

/// Record ids listed in the directory's `RECORDS` file, if it has one.
pub fn expected_records(dir: &Path) -> Result<Option<Vec<String>>> {
    let path = dir.join("RECORDS");
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(
        read_string(&path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
    ))
}

pub fn load(source: &RecordSource) -> Result<EcgRecord> {
    let mut record = match source {
        RecordSource::Wfdb { dir, id } => {
            let header = read(&dir.join(format!("{id}.hea")))?;
            let text = String::from_utf8_lossy(&header);
            let parsed = wfdb::parse_header(&text)?;
            let dat = parsed
                .signals
                .first()
                .map(|s| s.file_name.clone())
                .unwrap_or_else(|| format!("{id}.dat"));
            let signal = read(&dir.join(dat))?;
            let mut record = wfdb::parse_wfdb_212(&header, &signal)?;
            record.annotations =
                annotation::parse_annotations(&read(&dir.join(format!("{id}.atr")))?)?;
            record
        }
        RecordSource::Csv { dir, id } => {
            let mut record =
                csv::parse_signal_csv(id, &read_string(&dir.join(format!("{id}.csv")))?)?;
            record.annotations =
                csv::parse_annotation_csv(&read_string(&dir.join(format!("{id}.ann.csv")))?)?;
            record
        }
    };
    record.record_id = source.id().to_string();
    record.validate()?;
    Ok(record)
}

/// Write a record as `.hea`/`.dat`/`.atr` into `dir`.
pub fn write_wfdb(record: &EcgRecord, dir: &Path) -> Result<()> {
    let id = &record.record_id;
    let write = |name: String, bytes: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(path, e))
    };
    write(format!("{id}.hea"), wfdb::write_header(record).as_bytes())?;
    write(format!("{id}.dat"), &wfdb::write_signal_212(record))?;
    let anns: Vec<(usize, u16)> = record
        .annotations
        .iter()
        .map(|a| {
            annotation::symbol_to_code(a.symbol)
                .map(|c| (a.sample_index, c))
                .ok_or_else(|| Error::parse(format!("no annotation code for {:?}", a.symbol)))
        })
        .collect::<Result<_>>()?;
    write(format!("{id}.atr"), &annotation::encode_annotations(&anns))
}

//! JSON Lines files with a leading header record.
//!
//! The header carries the record kind, the schema version, the hash of the
//! configuration that produced the file and the run seed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: schema version {found}, this build reads {expected}")]
    SchemaVersionMismatch { path: String, found: u32, expected: u32 },
    #[error("{path}: holds `{found}` records, expected `{expected}`")]
    KindMismatch { path: String, found: String, expected: String },
    #[error("{path}: missing header line")]
    MissingHeader { path: String },
    #[error("{path} line {line}: {reason}")]
    Malformed { path: String, line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHeader {
    pub kind: String,
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
}

impl FileHeader {
    pub fn new(kind: impl Into<String>, config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            kind: kind.into(),
            schema_version: SCHEMA_VERSION,
            config_hash: config_hash.into(),
            seed,
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> JsonlError + '_ {
    move |source| JsonlError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes the header followed by one compact JSON record per line.
pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, header: &FileHeader, records: &[T]) -> Result<(), JsonlError> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(path))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    write_records(&mut out, header, records).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn write_records<T: Serialize>(out: &mut impl Write, header: &FileHeader, records: &[T]) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, header)?;
    out.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn parse_header(line: &str) -> Option<FileHeader> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    if !(obj.contains_key("schema_version") && obj.contains_key("kind")) {
        return None;
    }
    serde_json::from_value(value).ok()
}

/// Reads a headed file, checking its kind and schema version.
pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>, kind: &str) -> Result<(FileHeader, Vec<T>), JsonlError> {
    let path = path.as_ref();
    let (header, records) = read_maybe_headed(path)?;
    let shown = path.display().to_string();
    let header = header.ok_or(JsonlError::MissingHeader { path: shown.clone() })?;
    check_header(&shown, &header, kind)?;
    Ok((header, records))
}

fn check_header(path: &str, header: &FileHeader, kind: &str) -> Result<(), JsonlError> {
    if header.schema_version != SCHEMA_VERSION {
        return Err(JsonlError::SchemaVersionMismatch {
            path: path.to_string(),
            found: header.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    if header.kind != kind {
        return Err(JsonlError::KindMismatch {
            path: path.to_string(),
            found: header.kind.clone(),
            expected: kind.to_string(),
        });
    }
    Ok(())
}

/// Reads records from a file that may or may not start with a header.
/// A header, when present, must still match `kind` and the schema version.
pub fn read_records<T: DeserializeOwned>(path: impl AsRef<Path>, kind: &str) -> Result<Vec<T>, JsonlError> {
    let path = path.as_ref();
    let (header, records) = read_maybe_headed(path)?;
    if let Some(h) = header {
        check_header(&path.display().to_string(), &h, kind)?;
    }
    Ok(records)
}

fn read_maybe_headed<T: DeserializeOwned>(path: &Path) -> Result<(Option<FileHeader>, Vec<T>), JsonlError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut header = None;
    let mut records = Vec::new();
    let mut first = true;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        if first {
            first = false;
            if let Some(h) = parse_header(&line) {
                header = Some(h);
                continue;
            }
        }
        let record = serde_json::from_str(&line).map_err(|e| JsonlError::Malformed {
            path: path.display().to_string(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Item {
        id: u32,
        name: String,
    }

    #[test]
    fn round_trip_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/items.jsonl");
        let items = vec![Item { id: 1, name: "a".into() }, Item { id: 2, name: "b".into() }];
        let header = FileHeader::new("items", "abc", 7);
        write_jsonl(&path, &header, &items).unwrap();
        let (h, back): (FileHeader, Vec<Item>) = read_jsonl(&path, "items").unwrap();
        assert_eq!(h, header);
        assert_eq!(back, items);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(r#"{"kind":"items","schema_version":1,"config_hash":"abc","seed":7}"#));
    }

    #[test]
    fn wrong_version_and_kind_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        std::fs::write(&path, "{\"kind\":\"items\",\"schema_version\":9,\"config_hash\":\"\",\"seed\":0}\n").unwrap();
        let r: Result<(FileHeader, Vec<Item>), _> = read_jsonl(&path, "items");
        assert!(matches!(r, Err(JsonlError::SchemaVersionMismatch { found: 9, .. })));
        write_jsonl::<Item>(&path, &FileHeader::new("other", "", 0), &[]).unwrap();
        let r: Result<(FileHeader, Vec<Item>), _> = read_jsonl(&path, "items");
        assert!(matches!(r, Err(JsonlError::KindMismatch { .. })));
    }

    #[test]
    fn headerless_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        std::fs::write(&path, "{\"id\":3,\"name\":\"c\"}\n\n").unwrap();
        let items: Vec<Item> = read_records(&path, "items").unwrap();
        assert_eq!(items, vec![Item { id: 3, name: "c".into() }]);
        let r: Result<(FileHeader, Vec<Item>), _> = read_jsonl(&path, "items");
        assert!(matches!(r, Err(JsonlError::MissingHeader { .. })));
        std::fs::write(&path, "{\"id\":3}\n").unwrap();
        let r: Result<Vec<Item>, _> = read_records(&path, "items");
        assert!(matches!(r, Err(JsonlError::Malformed { line: 1, .. })));
    }
}

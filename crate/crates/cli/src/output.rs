use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::config::{manifest_path, Header};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Header line followed by one JSON record per line.
pub fn write_artifact<'a, T: Serialize + 'a>(path: &Path, header: &Header, records: impl IntoIterator<Item = &'a T>) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.to_line())?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Records of an artifact file; the header line is optional.
pub fn read_artifact<T: DeserializeOwned>(path: &Path) -> Result<(Option<Header>, Vec<T>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut header = None;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        if n == 0 {
            if let Some(h) = Header::parse(&line) {
                header = Some(h);
                continue;
            }
        }
        records.push(serde_json::from_str(&line).with_context(|| format!("{}:{}: malformed record", path.display(), n + 1))?);
    }
    Ok((header, records))
}

/// Pretty JSON document with the header under `"header"`.
pub fn write_document(path: &Path, header: &Header, body: Value) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("header".into(), serde_json::to_value(header)?);
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Plain JSONL (readable as a corpus file) plus a `.manifest.json` sidecar.
pub fn write_with_manifest<'a, T: Serialize + 'a>(
    path: &Path,
    header: &Header,
    records: impl IntoIterator<Item = &'a T>,
    manifest: Value,
) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    write_document(&manifest_path(path), header, manifest)
}

use std::fs;
use std::path::{Path, PathBuf};

use super::{Record, Trace, TraceMeta};
use crate::error::{Error, Result};

/// Writes `k,grad_evals,dist_sq,lyapunov` rows with shortest round-trip floats.
pub fn write_trace_csv(records: &[Record], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<Record>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    let records = rdr.deserialize().collect::<std::result::Result<Vec<Record>, _>>()?;
    if records.is_empty() {
        return Err(Error::Validation(format!("{} holds no trace rows", path.display())));
    }
    Ok(records)
}

pub fn write_trace_meta(meta: &TraceMeta, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the CSV at `csv_path` and its metadata next to it (`.json`
/// extension). Returns the metadata path.
pub fn write_trace(trace: &Trace, csv_path: impl AsRef<Path>) -> Result<PathBuf> {
    let csv_path = csv_path.as_ref();
    write_trace_csv(&trace.records, csv_path)?;
    let meta_path = csv_path.with_extension("json");
    write_trace_meta(&trace.meta, &meta_path)?;
    Ok(meta_path)
}

//! CSV formatting and atomic file output.

use crate::error::CliError;
use std::io::Write;
use std::path::Path;

/// Shortest round-tripping decimal; non-finite values are refused.
pub fn number(column: &str, v: f64) -> Result<String, CliError> {
    if v.is_finite() {
        Ok(format!("{v}"))
    } else {
        Err(CliError::NonFinite { column: column.to_string(), value: v })
    }
}

/// Like [`number`], but `+∞` is written as the token `inf`.
pub fn condition(column: &str, v: f64) -> Result<String, CliError> {
    if v == f64::INFINITY {
        Ok("inf".to_string())
    } else {
        number(column, v)
    }
}

/// Header plus string rows, serialised with the `csv` crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

//! CSV rows and JSONL run metadata.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;
use crate::sampler::{GENERATOR_NAME, GENERATOR_VERSION};

/// A record with a fixed CSV header.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub(crate) fn num(x: f64) -> String {
    format!("{x:?}")
}

pub(crate) fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes the header at creation and flushes after every row, so an
/// interrupted run leaves every completed row on disk.
pub struct CsvSink {
    out: BufWriter<File>,
}

impl CsvSink {
    pub fn create<R: CsvRow>(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", R::HEADER.join(","))?;
        out.flush()?;
        Ok(CsvSink { out })
    }

    pub fn write<R: CsvRow>(&mut self, row: &R) -> Result<()> {
        writeln!(self.out, "{}", row.fields().join(","))?;
        self.out.flush()?;
        Ok(())
    }
}

/// Renders rows as CSV text.
pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut s = R::HEADER.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.fields().join(","));
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct MetaRecord {
    pub study: String,
    pub config: serde_json::Value,
    pub generator: String,
    pub library_version: String,
    pub started_unix_seconds: u64,
    pub wall_time_seconds: f64,
    pub rows: usize,
}

impl MetaRecord {
    pub fn new(study: &str, config: &impl Serialize, started: SystemTime, wall: Duration, rows: usize) -> Result<Self> {
        Ok(MetaRecord {
            study: study.to_string(),
            config: serde_json::to_value(config)?,
            generator: format!("{GENERATOR_NAME} {GENERATOR_VERSION}"),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_seconds: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_time_seconds: wall.as_secs_f64(),
            rows,
        })
    }
}

/// `<out>.meta.jsonl`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.jsonl");
    PathBuf::from(s)
}

/// Appends one JSON line to the metadata file next to `out`.
pub fn append_meta(out: &Path, record: &MetaRecord) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(meta_path(out))?;
    writeln!(f, "{}", serde_json::to_string(record)?)?;
    Ok(())
}

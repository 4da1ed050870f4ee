//! Writes run results as `records.csv`, `trace.csv` and `summary.json`.
//!
//! Output is a pure function of the result: identical config and seed
//! give byte-identical files.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::config::OutputFormat;
use crate::sim::result::{Record, RunResult, TracePoint};

pub const RECORD_HEADER: [&str; 6] = ["replication", "strategy", "n_or_tau", "censored", "log_wealth", "growth"];
pub const TRACE_HEADER: [&str; 5] = ["replication", "strategy", "n", "log_wealth", "growth"];

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io {
        path: "<csv>".to_string(),
        message: e.to_string(),
    }
}

fn write_rows<W: Write, T: serde::Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| csv_err(e.into()))
}

pub fn write_records_csv<W: Write>(out: W, records: &[Record]) -> Result<()> {
    write_rows(out, &RECORD_HEADER, records)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &[TracePoint]) -> Result<()> {
    write_rows(out, &TRACE_HEADER, trace)
}

/// Reads back what [`write_records_csv`] wrote.
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<Record>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != RECORD_HEADER {
        return Err(Error::Io {
            path: "<csv>".to_string(),
            message: format!("unexpected header {header:?}"),
        });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn summary_json(result: &RunResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&result.summary).map_err(|e| Error::Io {
        path: "<json>".to_string(),
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Writes the result into `dir`, creating it if needed, and returns the
/// files written.
pub fn emit(result: &RunResult, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    if format.csv() {
        let path = dir.join("records.csv");
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &result.records)?;
        write_file(&path, &buf)?;
        written.push(path);
        if !result.trace.is_empty() {
            let path = dir.join("trace.csv");
            let mut buf = Vec::new();
            write_trace_csv(&mut buf, &result.trace)?;
            write_file(&path, &buf)?;
            written.push(path);
        }
    }
    if format.json() {
        let path = dir.join("summary.json");
        write_file(&path, summary_json(result)?.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

//! Execution traces: timestamped records of named real-valued signals.
//!
//! Signal access between samples uses last-sample hold, and queries past the
//! final timestamp return the final sample. Queries before the first
//! timestamp are errors.

pub mod synth;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

pub use synth::synth;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// `row` counts data rows from 0; the header is not a row.
    #[error("row {row}: {msg}")]
    Parse { row: usize, msg: String },
    #[error("row {0}: timestamp does not increase")]
    NonMonotonicTime(usize),
    #[error("row {0}: wrong number of fields")]
    RaggedRow(usize),
    #[error("trace has no records")]
    EmptyTrace,
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("time {0} is before the start of the trace")]
    BeforeTraceStart(f64),
    #[error("index {0} is out of range")]
    IndexOutOfRange(i64),
    #[error("bad generator spec: {0}")]
    BadSpec(String),
}

/// An immutable, validated trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    timestamps: Vec<f64>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    lookup: HashMap<String, usize>,
}

impl Trace {
    /// Build a trace from timestamps and `(name, samples)` columns.
    pub fn new(timestamps: Vec<f64>, signals: Vec<(String, Vec<f64>)>) -> Result<Self, TraceError> {
        if timestamps.is_empty() {
            return Err(TraceError::EmptyTrace);
        }
        for (row, &t) in timestamps.iter().enumerate() {
            if !t.is_finite() {
                return Err(TraceError::Parse { row, msg: "timestamp is not finite".into() });
            }
            if row > 0 && t <= timestamps[row - 1] {
                return Err(TraceError::NonMonotonicTime(row));
            }
        }
        let mut names = Vec::with_capacity(signals.len());
        let mut columns = Vec::with_capacity(signals.len());
        let mut lookup = HashMap::new();
        for (name, col) in signals {
            if name.is_empty() || name == "timestamp" {
                return Err(TraceError::Parse { row: 0, msg: format!("bad signal name `{name}`") });
            }
            if col.len() != timestamps.len() {
                return Err(TraceError::RaggedRow(col.len().min(timestamps.len())));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(TraceError::Parse { row, msg: format!("`{name}` is not finite") });
            }
            if lookup.insert(name.clone(), names.len()).is_some() {
                return Err(TraceError::Parse { row: 0, msg: format!("duplicate signal `{name}`") });
            }
            names.push(name);
            columns.push(col);
        }
        Ok(Trace { timestamps, names, columns, lookup })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    /// Parse CSV with a `timestamp` column and one column per signal.
    pub fn from_reader(input: impl Read) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
        let header = rdr
            .headers()
            .map_err(|e| TraceError::Parse { row: 0, msg: format!("bad header: {e}") })?
            .clone();
        let fields: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
        let time_col = fields
            .iter()
            .position(|h| h == "timestamp")
            .ok_or_else(|| TraceError::Parse { row: 0, msg: "missing `timestamp` column".into() })?;
        let mut timestamps = Vec::new();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); fields.len()];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| TraceError::Parse { row, msg: e.to_string() })?;
            if rec.len() != fields.len() {
                return Err(TraceError::RaggedRow(row));
            }
            for (k, cell) in rec.iter().enumerate() {
                let cell = cell.trim();
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| TraceError::Parse { row, msg: format!("bad number `{cell}`") })?;
                columns[k].push(v);
            }
            let t = columns[time_col][row];
            if row > 0 && t <= timestamps[row - 1] {
                return Err(TraceError::NonMonotonicTime(row));
            }
            timestamps.push(t);
        }
        let signals = fields
            .into_iter()
            .zip(columns)
            .enumerate()
            .filter(|(k, _)| *k != time_col)
            .map(|(_, pair)| pair)
            .collect();
        Trace::new(timestamps, signals)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_to(&self, out: impl Write) -> Result<(), TraceError> {
        let mut w = csv::Writer::from_writer(out);
        let map_err = |e: csv::Error| TraceError::Io(e.into());
        let mut header = vec!["timestamp"];
        header.extend(self.names.iter().map(String::as_str));
        w.write_record(&header).map_err(map_err)?;
        let mut line = Vec::with_capacity(header.len());
        for (i, t) in self.timestamps.iter().enumerate() {
            line.clear();
            line.push(t.to_string());
            line.extend(self.columns.iter().map(|c| c[i].to_string()));
            w.write_record(&line).map_err(map_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Number of records.
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    /// Always false; traces hold at least one record.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn signal_names(&self) -> &[String] {
        &self.names
    }

    pub fn signal(&self, name: &str) -> Option<&[f64]> {
        self.lookup.get(name).map(|&k| self.columns[k].as_slice())
    }

    pub fn has_signal(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    /// Largest index whose timestamp is at most `t`.
    pub fn t2i(&self, t: f64) -> Result<usize, TraceError> {
        if t.is_nan() || t < self.timestamps[0] {
            return Err(TraceError::BeforeTraceStart(t));
        }
        Ok(self.timestamps.partition_point(|&x| x <= t) - 1)
    }

    pub fn i2t(&self, i: i64) -> Result<f64, TraceError> {
        usize::try_from(i)
            .ok()
            .and_then(|k| self.timestamps.get(k).copied())
            .ok_or(TraceError::IndexOutOfRange(i))
    }

    pub fn at_time(&self, signal: &str, t: f64) -> Result<f64, TraceError> {
        let col = self.column(signal)?;
        Ok(col[self.t2i(t)?])
    }

    pub fn at_index(&self, signal: &str, i: i64) -> Result<f64, TraceError> {
        let col = self.column(signal)?;
        usize::try_from(i)
            .ok()
            .and_then(|k| col.get(k).copied())
            .ok_or(TraceError::IndexOutOfRange(i))
    }

    fn column(&self, signal: &str) -> Result<&[f64], TraceError> {
        self.signal(signal).ok_or_else(|| TraceError::UnknownSignal(signal.to_string()))
    }
}

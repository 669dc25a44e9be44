//! Layer traces: the per-packet identifier sequences fed to the dispatch
//! measurement, stored on disk as one comma-separated decimal line per
//! packet.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::dispatch::ProtocolId;

#[derive(Error, Debug)]
pub enum TraceError {
    #[error("trace read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },
}

/// Identifier sequences of many packets, stored flat: `ids` holds every
/// packet's identifiers back to back, `bounds` the start of each packet
/// plus a final end sentinel.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LayerTrace {
    ids: Vec<ProtocolId>,
    bounds: Vec<usize>,
}

impl LayerTrace {
    pub fn new() -> Self {
        Self {
            ids: Vec::new(),
            bounds: vec![0],
        }
    }

    pub fn push_packet(&mut self, layers: &[ProtocolId]) {
        self.ids.extend_from_slice(layers);
        self.bounds.push(self.ids.len());
    }

    /// All identifiers in dispatch order, across packet boundaries.
    pub fn ids(&self) -> &[ProtocolId] {
        &self.ids
    }

    pub fn pdu_count(&self) -> usize {
        self.ids.len()
    }

    pub fn packet_count(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn packets(&self) -> impl Iterator<Item = &[ProtocolId]> + '_ {
        self.bounds
            .windows(2)
            .map(move |w| &self.ids[w[0]..w[1]])
    }
}

impl FromIterator<Vec<ProtocolId>> for LayerTrace {
    fn from_iter<T: IntoIterator<Item = Vec<ProtocolId>>>(iter: T) -> Self {
        let mut trace = LayerTrace::new();
        for packet in iter {
            trace.push_packet(&packet);
        }
        trace
    }
}

/// Reads a trace file: one packet per line, decimal identifiers separated
/// by commas, blank lines ignored.
pub fn read_layer_trace(path: impl AsRef<Path>) -> Result<LayerTrace, TraceError> {
    let reader = BufReader::new(File::open(path)?);
    let mut trace = LayerTrace::new();
    let mut layers: Vec<ProtocolId> = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        layers.clear();
        for (field_no, field) in line.split(',').enumerate() {
            let id = field.trim().parse::<ProtocolId>().map_err(|e| {
                TraceError::Parse {
                    line: line_no + 1,
                    field: field_no + 1,
                    message: format!("`{}`: {e}", field.trim()),
                }
            })?;
            layers.push(id);
        }
        trace.push_packet(&layers);
    }
    Ok(trace)
}

pub fn write_layer_trace(trace: &LayerTrace, mut out: impl Write) -> std::io::Result<()> {
    let mut buf = String::new();
    for packet in trace.packets() {
        buf.clear();
        for (i, id) in packet.iter().enumerate() {
            if i > 0 {
                buf.push(',');
            }
            buf.push_str(&id.to_string());
        }
        buf.push('\n');
        out.write_all(buf.as_bytes())?;
    }
    Ok(())
}

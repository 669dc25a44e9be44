//! Unknown-protocol records with threshold/sampling/duration throttling,
//! plus the tab-separated log writers.
//!
//! Throttling is keyed per (analyzer, identifier) and driven entirely by
//! capture time, so replaying a trace produces identical logs.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::dispatch::ProtocolId;
use crate::engine::event::Event;

/// Rate-limiting knobs for unknown-protocol reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ThrottleConfig {
    /// Occurrences of one key always logged before sampling kicks in.
    pub threshold: u64,
    /// After the threshold, every Nth occurrence is logged.
    pub sampling_rate: u64,
    /// Seconds of capture time after which a limited key resets.
    pub duration_secs: f64,
    /// Leading payload bytes captured into each record.
    pub snap_bytes: usize,
}

impl Default for ThrottleConfig {
    fn default() -> Self {
        Self {
            threshold: 3,
            sampling_rate: 100,
            duration_secs: 3600.0,
            snap_bytes: 10,
        }
    }
}

/// One failed dispatch: where it happened, what identifier missed, and the
/// first bytes of the PDU nobody claimed.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownProtocolRecord {
    pub time: f64,
    pub analyzer: String,
    pub identifier: ProtocolId,
    pub snap: Vec<u8>,
    /// Whether the throttle let this occurrence through to the log.
    pub logged: bool,
}

#[derive(Debug, Clone, Copy)]
struct KeyState {
    count: u64,
    limited_since: Option<f64>,
}

/// Per-key occurrence counters. One instance per engine, serialized behind
/// the registry's mutex.
#[derive(Debug, Default)]
pub struct ThrottleState {
    keys: HashMap<(u32, ProtocolId), KeyState>,
}

impl ThrottleState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Count one occurrence of (analyzer, identifier) at capture time `now`
    /// and decide whether it gets logged: the first `threshold` occurrences
    /// always, afterwards every `sampling_rate`-th, and once `now` passes
    /// the limit timestamp by `duration_secs` the key starts over.
    pub fn report(
        &mut self,
        analyzer: u32,
        identifier: ProtocolId,
        now: f64,
        cfg: &ThrottleConfig,
    ) -> bool {
        let entry = self.keys.entry((analyzer, identifier)).or_insert(KeyState {
            count: 0,
            limited_since: None,
        });
        if let Some(since) = entry.limited_since {
            if now > since + cfg.duration_secs {
                entry.count = 0;
                entry.limited_since = None;
            }
        }
        entry.count += 1;
        if entry.count <= cfg.threshold {
            if entry.count == cfg.threshold {
                entry.limited_since = Some(now);
            }
            true
        } else {
            (entry.count - cfg.threshold) % cfg.sampling_rate == 0
        }
    }
}

fn hex_string(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Write the `unknown_protocols.log` header row.
pub fn write_unknown_header<W: Write>(mut w: W) -> io::Result<()> {
    writeln!(w, "ts\tanalyzer\tprotocol_id\tfirst_bytes")
}

/// Append one record: tab-separated, identifier as 0x-hex, snap as
/// lowercase hex.
pub fn write_unknown_line<W: Write>(mut w: W, rec: &UnknownProtocolRecord) -> io::Result<()> {
    writeln!(
        w,
        "{:.6}\t{}\t{:#x}\t{}",
        rec.time,
        rec.analyzer,
        rec.identifier,
        hex_string(&rec.snap)
    )
}

/// Write `unknown_protocols.log` in one go: header row, then one line per
/// record.
pub fn write_unknown_log<'a, W, I>(mut w: W, records: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a UnknownProtocolRecord>,
{
    write_unknown_header(&mut w)?;
    for rec in records {
        write_unknown_line(&mut w, rec)?;
    }
    Ok(())
}

/// Write the `events.log` header row.
pub fn write_events_header<W: Write>(mut w: W) -> io::Result<()> {
    writeln!(w, "ts\tevent\tfields")
}

/// Append one event line: timestamp, event name, space-joined key=value
/// pairs.
pub fn write_event_line<W: Write>(mut w: W, time: f64, event: &Event) -> io::Result<()> {
    writeln!(w, "{:.6}\t{}\t{}", time, event.name, event.format_fields())
}

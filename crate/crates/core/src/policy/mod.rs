//! Detection logic layered on the event stream. Detectors are pure
//! consumers: they watch decoded events, keep their own state, and raise
//! alerts that cite the triggering events by sequence number.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use crate::engine::{Event, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlertKind {
    /// A GOOSE publisher skipped state numbers: possible injected state or
    /// suppressed legitimate messages.
    StateNumberJump,
    /// A DCP Identify probe asked for a station name that a recent rename
    /// retired: someone is looking for the identity a device just lost.
    RenameAttack,
}

impl fmt::Display for AlertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StateNumberJump => "StateNumberJump",
            Self::RenameAttack => "RenameAttack",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alert {
    pub time: f64,
    pub kind: AlertKind,
    pub detail: String,
    /// Sequence numbers of the events that substantiate the alert.
    pub evidence: Vec<u64>,
}

/// Writes the alert log: tab-separated, one line per alert.
pub fn write_alerts_header<W: Write + ?Sized>(w: &mut W) -> io::Result<()> {
    writeln!(w, "ts\tkind\tdetail")
}

pub fn write_alert_line<W: Write + ?Sized>(w: &mut W, alert: &Alert) -> io::Result<()> {
    writeln!(w, "{:.6}\t{}\t{}", alert.time, alert.kind, alert.detail)
}

/// Watches goose_message events for state-number discontinuities per
/// dataset. stNum increments by one on each state change; a jump of more
/// than one is suspicious unless it is a counter rollover, where the
/// publisher wraps from near the 32-bit ceiling back to a small value.
pub struct GooseDetector {
    last_st_num: HashMap<String, u64>,
    rollover_window: u64,
}

impl GooseDetector {
    pub fn new(rollover_window: u64) -> Self {
        Self {
            last_st_num: HashMap::new(),
            rollover_window,
        }
    }

    pub fn on_event(&mut self, seq: u64, time: f64, event: &Event) -> Option<Alert> {
        if event.name != "goose_message" {
            return None;
        }
        let dat_set = event.get("datSet").and_then(Value::as_str)?;
        let st_num = event.get("stNum").and_then(Value::as_u64)?;
        let alert = match self.last_st_num.get(dat_set) {
            Some(&prev) if st_num > prev + 1 && !self.is_rollover(prev, st_num) => Some(Alert {
                time,
                kind: AlertKind::StateNumberJump,
                detail: format!("{dat_set}: state number jumped from {prev} to {st_num}"),
                evidence: vec![seq],
            }),
            // First sight, retransmission, step by one, or a reset to a
            // lower number (device restart) — all unremarkable.
            _ => None,
        };
        self.last_st_num.insert(dat_set.to_owned(), st_num);
        alert
    }

    fn is_rollover(&self, prev: u64, next: u64) -> bool {
        prev >= u32::MAX as u64 - self.rollover_window && next <= self.rollover_window
    }
}

struct PendingRename {
    device: [u8; 6],
    new_name: String,
    opened: f64,
    request_seq: u64,
}

struct RetiredName {
    at: f64,
    replaced_by: String,
    commit_seq: u64,
}

/// Correlates DCP rename transactions with later Identify probes.
///
/// Current station names are learned from responses that carry a
/// NameOfStation block (Identify responses announce them). A Set request
/// carrying a new name opens a transaction keyed by xid; the matching
/// successful response commits it, retiring the device's previous name.
/// An Identify request that filters on a name retired less than
/// `retire_secs` ago raises an alert.
pub struct DcpDetector {
    names: HashMap<[u8; 6], String>,
    pending: HashMap<u64, PendingRename>,
    retired: HashMap<String, RetiredName>,
    retire_secs: f64,
}

impl DcpDetector {
    pub fn new(retire_secs: f64) -> Self {
        Self {
            names: HashMap::new(),
            pending: HashMap::new(),
            retired: HashMap::new(),
            retire_secs,
        }
    }

    pub fn on_event(&mut self, seq: u64, time: f64, event: &Event) -> Option<Alert> {
        match event.name {
            "dcp_request" => self.on_request(seq, time, event),
            "dcp_response" => {
                self.on_response(seq, time, event);
                None
            }
            _ => None,
        }
    }

    fn on_request(&mut self, seq: u64, time: f64, event: &Event) -> Option<Alert> {
        let service = event.get("service").and_then(Value::as_str)?;
        let name = event.get("name").and_then(Value::as_str);
        match (service, name) {
            ("Set", Some(new_name)) => {
                let dst = event.get("dst").and_then(Value::as_mac)?;
                let xid = event.get("xid").and_then(Value::as_u64)?;
                // An abandoned transaction with the same xid is overwritten.
                self.pending.insert(
                    xid,
                    PendingRename {
                        device: dst,
                        new_name: new_name.to_owned(),
                        opened: time,
                        request_seq: seq,
                    },
                );
                None
            }
            ("Identify", Some(wanted)) => {
                let retired = self.retired.get(wanted)?;
                if time - retired.at <= self.retire_secs {
                    Some(Alert {
                        time,
                        kind: AlertKind::RenameAttack,
                        detail: format!(
                            "identify probe for \"{wanted}\", retired by rename to \"{}\"",
                            retired.replaced_by
                        ),
                        evidence: vec![retired.commit_seq, seq],
                    })
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn on_response(&mut self, seq: u64, time: f64, event: &Event) {
        let Some(xid) = event.get("xid").and_then(Value::as_u64) else {
            return;
        };
        let Some(src) = event.get("src").and_then(Value::as_mac) else {
            return;
        };
        let success = event.get("success").and_then(Value::as_bool) == Some(true);
        self.expire_pending(time);
        if let Some(pending) = self.pending.remove(&xid) {
            // Only the addressed device can commit the rename.
            if success && pending.device == src {
                let old = self.names.get(&src).cloned();
                if let Some(old) = old {
                    if old != pending.new_name {
                        self.retired.insert(
                            old,
                            RetiredName {
                                at: time,
                                replaced_by: pending.new_name.clone(),
                                commit_seq: pending.request_seq.max(seq),
                            },
                        );
                    }
                }
                self.names.insert(src, pending.new_name);
            }
        }
        // Any response announcing a station name teaches us the device's
        // current identity (Identify responses in particular).
        if let Some(announced) = event.get("name").and_then(Value::as_str) {
            self.names.insert(src, announced.to_owned());
        }
    }

    fn expire_pending(&mut self, now: f64) {
        let ttl = self.retire_secs;
        self.pending.retain(|_, p| now - p.opened <= ttl);
    }
}

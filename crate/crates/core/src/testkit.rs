//! Synthetic analyzers for routing tests: a minimal dissector whose wire
//! format is a fixed 4-byte header naming the next hop, so arbitrary
//! transition graphs can be exercised with hand-built packets.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

/// Header: flags byte (bit 0 = terminal), one reserved byte, 16-bit
/// big-endian next identifier.
pub struct ShimAnalyzer {
    name: String,
}

pub const SHIM_HEADER_LEN: usize = 4;

impl ShimAnalyzer {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into() }
    }
}

impl Analyzer for ShimAnalyzer {
    fn name(&self) -> &str {
        &self.name
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < SHIM_HEADER_LEN {
            return AnalyzeOutcome::malformed("shim header truncated");
        }
        if b[0] & 1 == 1 {
            return AnalyzeOutcome::Terminal;
        }
        AnalyzeOutcome::Forward {
            next_id: u16::from_be_bytes([b[2], b[3]]) as ProtocolId,
            payload: span.from_offset(SHIM_HEADER_LEN),
        }
    }
}

/// One shim header.
pub fn shim_header(terminal: bool, next_id: u16) -> [u8; SHIM_HEADER_LEN] {
    let id = next_id.to_be_bytes();
    [terminal as u8, 0, id[0], id[1]]
}

/// A packet walking the identifiers in order: each header names the next
/// transition, the last layer is terminal.
pub fn shim_chain(transitions: &[u16]) -> Vec<u8> {
    let mut raw = Vec::with_capacity((transitions.len() + 1) * SHIM_HEADER_LEN);
    for &id in transitions {
        raw.extend_from_slice(&shim_header(false, id));
    }
    raw.extend_from_slice(&shim_header(true, 0));
    raw
}

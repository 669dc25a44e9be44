//! Small link-layer adapters: fixed-length skip, Linux cooked capture, and
//! the BSD loopback pseudo-header.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

/// The single forwarding identifier a skip node emits; configs bind it to
/// whatever follows the skipped prefix.
pub const SKIP_CHILD_ID: ProtocolId = 0;

/// Drops a fixed-length prefix (trailer tags, proprietary shims) and hands
/// the rest to a configured child.
pub struct SkipAnalyzer {
    bytes: usize,
}

impl SkipAnalyzer {
    pub fn new(bytes: usize) -> Self {
        Self { bytes }
    }
}

impl Analyzer for SkipAnalyzer {
    fn name(&self) -> &str {
        "SKIP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        if ctx.bytes(span).len() < self.bytes {
            return AnalyzeOutcome::malformed("span shorter than the skipped prefix");
        }
        AnalyzeOutcome::Forward {
            next_id: SKIP_CHILD_ID,
            payload: span.from_offset(self.bytes),
        }
    }
}

/// Linux cooked capture v1 (SLL), the pseudo-header pcap uses for the
/// "any" device.
pub struct LinuxSllAnalyzer;

impl Analyzer for LinuxSllAnalyzer {
    fn name(&self) -> &str {
        "LINUX_SLL"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 16 {
            return AnalyzeOutcome::malformed("sll header truncated");
        }
        AnalyzeOutcome::Forward {
            next_id: be16(b, 14) as ProtocolId,
            payload: span.from_offset(16),
        }
    }
}

/// BSD loopback encapsulation: a 4-byte AF_* family in the capturing
/// host's byte order.
pub struct NullAnalyzer;

impl Analyzer for NullAnalyzer {
    fn name(&self) -> &str {
        "NULL"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 4 {
            return AnalyzeOutcome::malformed("loopback family truncated");
        }
        let le = u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        // Address families are tiny; a value past 16 bits means the capture
        // came from an opposite-endian host.
        let family = if le > 0xFFFF { le.swap_bytes() } else { le };
        AnalyzeOutcome::Forward {
            next_id: family as ProtocolId,
            payload: span.from_offset(4),
        }
    }
}

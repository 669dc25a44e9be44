//! IPv4 (RFC 791) and IPv6 (RFC 8200) dissection in one analyzer keyed on
//! the version nibble, so a single registry node serves both EtherTypes and
//! IP-in-IP nesting in either direction.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

pub struct IpAnalyzer;

/// Extension headers that sit between the fixed IPv6 header and the upper
/// layer: hop-by-hop, routing, fragment, destination options.
fn is_extension(next_header: u8) -> bool {
    matches!(next_header, 0 | 43 | 44 | 60)
}

const MAX_EXTENSION_HEADERS: usize = 8;

impl Analyzer for IpAnalyzer {
    fn name(&self) -> &str {
        "IP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.is_empty() {
            return AnalyzeOutcome::malformed("empty ip packet");
        }
        match b[0] >> 4 {
            4 => analyze_v4(b, span),
            6 => analyze_v6(b, span),
            v => AnalyzeOutcome::Malformed {
                reason: format!("unsupported ip version {v}"),
            },
        }
    }
}

fn analyze_v4(b: &[u8], span: Span) -> AnalyzeOutcome {
    if b.len() < 20 {
        return AnalyzeOutcome::malformed("ipv4 header truncated");
    }
    let ihl = (b[0] & 0x0F) as usize;
    if ihl < 5 {
        return AnalyzeOutcome::malformed("ipv4 header length below minimum");
    }
    let header_len = ihl * 4;
    if header_len > b.len() {
        return AnalyzeOutcome::malformed("ipv4 options truncated");
    }
    let total_len = be16(b, 2) as usize;
    if total_len < header_len {
        return AnalyzeOutcome::malformed("ipv4 total length below header length");
    }
    if total_len > b.len() {
        return AnalyzeOutcome::malformed("ipv4 payload truncated");
    }
    // total_len < b.len() means link-layer padding; the span end trims it.
    AnalyzeOutcome::Forward {
        next_id: b[9] as ProtocolId,
        payload: Span {
            start: span.start + header_len,
            end: span.start + total_len,
        },
    }
}

fn analyze_v6(b: &[u8], span: Span) -> AnalyzeOutcome {
    if b.len() < 40 {
        return AnalyzeOutcome::malformed("ipv6 header truncated");
    }
    let payload_len = be16(b, 4) as usize;
    let end = 40 + payload_len;
    if end > b.len() {
        return AnalyzeOutcome::malformed("ipv6 payload truncated");
    }
    let mut next = b[6];
    let mut off = 40usize;
    let mut headers = 0usize;
    while is_extension(next) {
        headers += 1;
        if headers > MAX_EXTENSION_HEADERS {
            return AnalyzeOutcome::malformed("ipv6 extension header chain too long");
        }
        if off + 2 > end {
            return AnalyzeOutcome::malformed("ipv6 extension header truncated");
        }
        // Fragment headers are fixed 8 bytes; the others carry a length
        // field in 8-byte units excluding the first unit.
        let ext_len = if next == 44 {
            8
        } else {
            (b[off + 1] as usize + 1) * 8
        };
        if off + ext_len > end {
            return AnalyzeOutcome::malformed("ipv6 extension header truncated");
        }
        next = b[off];
        off += ext_len;
    }
    AnalyzeOutcome::Forward {
        next_id: next as ProtocolId,
        payload: Span {
            start: span.start + off,
            end: span.start + end,
        },
    }
}

//! PPPoE (RFC 2516) and PPP (RFC 1661) dissection.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

pub struct PppoeAnalyzer;

impl Analyzer for PppoeAnalyzer {
    fn name(&self) -> &str {
        "PPPOE"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 6 {
            return AnalyzeOutcome::malformed("pppoe header truncated");
        }
        if b[0] != 0x11 {
            return AnalyzeOutcome::malformed("unsupported pppoe version/type");
        }
        // Non-zero code means a discovery-stage packet (PADI/PADO/...):
        // tags only, no PPP payload to hand on.
        if b[1] != 0 {
            return AnalyzeOutcome::Terminal;
        }
        let length = be16(b, 4) as usize;
        if length < 2 {
            return AnalyzeOutcome::malformed("pppoe session payload shorter than ppp protocol field");
        }
        if 6 + length > b.len() {
            return AnalyzeOutcome::malformed("pppoe session payload truncated");
        }
        // The session payload begins with the 2-byte PPP protocol number;
        // anything past 6 + length is link padding and is dropped here.
        AnalyzeOutcome::Forward {
            next_id: be16(b, 6) as ProtocolId,
            payload: Span {
                start: span.start + 8,
                end: span.start + 6 + length,
            },
        }
    }
}

pub struct PppAnalyzer;

impl Analyzer for PppAnalyzer {
    fn name(&self) -> &str {
        "PPP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 2 {
            return AnalyzeOutcome::malformed("ppp protocol field truncated");
        }
        // HDLC-framed PPP keeps the address/control bytes FF 03 in front of
        // the protocol field; both framings appear in captures.
        let (proto_off, header) = if b[0] == 0xFF && b[1] == 0x03 {
            (2usize, 4usize)
        } else {
            (0usize, 2usize)
        };
        if b.len() < header {
            return AnalyzeOutcome::malformed("ppp protocol field truncated");
        }
        AnalyzeOutcome::Forward {
            next_id: be16(b, proto_off) as ProtocolId,
            payload: span.from_offset(header),
        }
    }
}

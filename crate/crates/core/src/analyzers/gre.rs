//! GRE dissection (RFC 2784 with the RFC 2890 key/sequence extensions).

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

pub struct GreAnalyzer;

impl Analyzer for GreAnalyzer {
    fn name(&self) -> &str {
        "GRE"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 4 {
            return AnalyzeOutcome::malformed("gre header truncated");
        }
        let flags = be16(b, 0);
        if flags & 0x0007 != 0 {
            return AnalyzeOutcome::malformed("unsupported gre version");
        }
        if flags & 0x4000 != 0 {
            return AnalyzeOutcome::malformed("gre source routing not supported");
        }
        let mut header_len = 4usize;
        if flags & 0x8000 != 0 {
            header_len += 4; // checksum + reserved
        }
        if flags & 0x2000 != 0 {
            header_len += 4; // key
        }
        if flags & 0x1000 != 0 {
            header_len += 4; // sequence number
        }
        if b.len() < header_len {
            return AnalyzeOutcome::malformed("gre optional fields truncated");
        }
        // The protocol field shares the EtherType space.
        AnalyzeOutcome::Forward {
            next_id: be16(b, 2) as ProtocolId,
            payload: span.from_offset(header_len),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(raw: Vec<u8>) -> AnalyzeOutcome {
        let mut ctx = PacketContext::new(0.0, 1, raw);
        let whole = ctx.whole();
        GreAnalyzer.analyze(&mut ctx, whole)
    }

    fn header(flags: u16, proto: u16, extra: &[u8]) -> Vec<u8> {
        let mut h = Vec::new();
        h.extend_from_slice(&flags.to_be_bytes());
        h.extend_from_slice(&proto.to_be_bytes());
        h.extend_from_slice(extra);
        h
    }

    #[test]
    fn bare_header_is_four_bytes() {
        let mut raw = header(0, 0x0800, &[]);
        raw.extend_from_slice(&[0u8; 20]);
        match run(raw) {
            AnalyzeOutcome::Forward { next_id, payload } => {
                assert_eq!(next_id, 0x0800);
                assert_eq!(payload.start, 4);
            }
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn key_and_sequence_extend_the_header_to_twelve_bytes() {
        let mut raw = header(0x3000, 0x0800, &[0u8; 8]);
        raw.extend_from_slice(&[0u8; 20]);
        match run(raw) {
            AnalyzeOutcome::Forward { payload, .. } => assert_eq!(payload.start, 12),
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn checksum_flag_adds_four_bytes() {
        let mut raw = header(0x8000, 0x6558, &[0u8; 4]);
        raw.extend_from_slice(&[0u8; 14]);
        match run(raw) {
            AnalyzeOutcome::Forward { next_id, payload } => {
                assert_eq!(next_id, 0x6558);
                assert_eq!(payload.start, 8);
            }
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_forms_are_malformed() {
        // version 1 (PPTP)
        assert!(matches!(
            run(header(0x0001, 0x880B, &[0u8; 8])),
            AnalyzeOutcome::Malformed { .. }
        ));
        // routing flag
        assert!(matches!(
            run(header(0x4000, 0x0800, &[0u8; 8])),
            AnalyzeOutcome::Malformed { .. }
        ));
        // flags promise more fields than captured
        assert!(matches!(
            run(header(0x3000, 0x0800, &[0u8; 2])),
            AnalyzeOutcome::Malformed { .. }
        ));
    }
}

//! MPLS label stack dissection (RFC 3032).
//!
//! MPLS carries no payload-type field, so after popping the stack the
//! payload protocol is guessed from the first nibble (4 or 6 selects the
//! matching IP version, the heuristic in most label-switched captures) and
//! falls back to a configured default otherwise.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be32;

/// One 32-bit label stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MplsEntry {
    pub label: u32,
    pub tc: u8,
    pub bottom: bool,
    pub ttl: u8,
}

pub fn decode_mpls_entry(word: u32) -> MplsEntry {
    MplsEntry {
        label: word >> 12,
        tc: ((word >> 9) & 0x7) as u8,
        bottom: (word >> 8) & 1 == 1,
        ttl: (word & 0xFF) as u8,
    }
}

pub struct MplsAnalyzer {
    default_child: ProtocolId,
}

impl MplsAnalyzer {
    pub fn new(default_child: ProtocolId) -> Self {
        Self { default_child }
    }
}

impl Analyzer for MplsAnalyzer {
    fn name(&self) -> &str {
        "MPLS"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        let mut off = 0usize;
        loop {
            if b.len() < off + 4 {
                return AnalyzeOutcome::malformed("label stack truncated");
            }
            let entry = decode_mpls_entry(be32(b, off));
            off += 4;
            if entry.bottom {
                break;
            }
        }
        if off >= b.len() {
            return AnalyzeOutcome::malformed("no payload after label stack");
        }
        let next_id = match b[off] >> 4 {
            4 => 0x0800,
            6 => 0x86DD,
            _ => self.default_child,
        };
        AnalyzeOutcome::Forward {
            next_id,
            payload: span.from_offset(off),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(label: u32, tc: u8, bottom: bool, ttl: u8) -> [u8; 4] {
        let word = (label << 12) | ((tc as u32) << 9) | ((bottom as u32) << 8) | ttl as u32;
        word.to_be_bytes()
    }

    fn analyze(raw: Vec<u8>) -> AnalyzeOutcome {
        let mut ctx = PacketContext::new(0.0, 1, raw);
        let whole = ctx.whole();
        MplsAnalyzer::new(0x0800).analyze(&mut ctx, whole)
    }

    #[test]
    fn entry_bit_layout() {
        let e = decode_mpls_entry(u32::from_be_bytes(entry(100, 5, true, 64)));
        assert_eq!(e, MplsEntry { label: 100, tc: 5, bottom: true, ttl: 64 });
    }

    #[test]
    fn pops_to_the_bottom_of_the_stack_in_one_layer() {
        let mut raw = Vec::new();
        raw.extend_from_slice(&entry(16, 0, false, 64));
        raw.extend_from_slice(&entry(17, 0, false, 64));
        raw.extend_from_slice(&entry(18, 0, true, 64));
        raw.push(0x45); // v4 nibble
        raw.extend_from_slice(&[0u8; 19]);
        match analyze(raw) {
            AnalyzeOutcome::Forward { next_id, payload } => {
                assert_eq!(next_id, 0x0800);
                assert_eq!(payload.start, 12);
            }
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn first_nibble_selects_the_ip_version() {
        let mut v6 = entry(16, 0, true, 64).to_vec();
        v6.push(0x60);
        match analyze(v6) {
            AnalyzeOutcome::Forward { next_id, .. } => assert_eq!(next_id, 0x86DD),
            other => panic!("expected forward, got {other:?}"),
        }
        let mut other_nibble = entry(16, 0, true, 64).to_vec();
        other_nibble.push(0x10);
        match analyze(other_nibble) {
            // falls back to the configured default
            AnalyzeOutcome::Forward { next_id, .. } => assert_eq!(next_id, 0x0800),
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn runaway_and_empty_stacks_are_malformed() {
        // never reaches bottom-of-stack
        let mut raw = Vec::new();
        for _ in 0..4 {
            raw.extend_from_slice(&entry(16, 0, false, 64));
        }
        assert!(matches!(analyze(raw), AnalyzeOutcome::Malformed { .. }));
        // bottom entry but nothing after it
        assert!(matches!(
            analyze(entry(16, 0, true, 64).to_vec()),
            AnalyzeOutcome::Malformed { .. }
        ));
        // truncated entry
        assert!(matches!(
            analyze(vec![0, 1, 2]),
            AnalyzeOutcome::Malformed { .. }
        ));
    }
}

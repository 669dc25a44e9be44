//! IEEE 802.1Q VLAN tag dissection.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

/// Decoded tag control information (802.1Q-2018, clause 9.6).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VlanTag {
    /// Priority code point, upper 3 bits.
    pub pcp: u8,
    /// Drop eligible indicator, 1 bit.
    pub dei: u8,
    /// VLAN identifier, lower 12 bits.
    pub vid: u16,
}

pub fn decode_tci(tci: u16) -> VlanTag {
    VlanTag {
        pcp: (tci >> 13) as u8,
        dei: ((tci >> 12) & 1) as u8,
        vid: tci & 0x0FFF,
    }
}

pub struct VlanAnalyzer;

impl Analyzer for VlanAnalyzer {
    fn name(&self) -> &str {
        "VLAN"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 4 {
            return AnalyzeOutcome::malformed("vlan tag truncated");
        }
        // TCI is decoded for its layout contract; routing only needs the
        // inner EtherType.
        let _ = decode_tci(be16(b, 0));
        AnalyzeOutcome::Forward {
            next_id: be16(b, 2) as ProtocolId,
            payload: span.from_offset(4),
        }
    }
}

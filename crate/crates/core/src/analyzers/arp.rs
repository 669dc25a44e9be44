//! ARP dissection (RFC 826), restricted to the Ethernet/IPv4 address pair
//! that covers practically all observed traffic.

use std::net::Ipv4Addr;

use crate::engine::{AnalyzeOutcome, Analyzer, Event, PacketContext, Span, Value};

use super::be16;

pub struct ArpAnalyzer;

const MESSAGE_LEN: usize = 28;

impl Analyzer for ArpAnalyzer {
    fn name(&self) -> &str {
        "ARP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < MESSAGE_LEN {
            return AnalyzeOutcome::malformed("arp message truncated");
        }
        let hlen = b[4];
        let plen = b[5];
        if hlen != 6 || plen != 4 {
            return AnalyzeOutcome::malformed("unsupported arp address lengths");
        }
        let op = be16(b, 6);
        let mut sha = [0u8; 6];
        let mut tha = [0u8; 6];
        sha.copy_from_slice(&b[8..14]);
        tha.copy_from_slice(&b[18..24]);
        let spa = Ipv4Addr::new(b[14], b[15], b[16], b[17]);
        let tpa = Ipv4Addr::new(b[24], b[25], b[26], b[27]);
        let event = Event::new("arp_message")
            .field("op", Value::U64(op as u64))
            .field("sha", Value::Mac(sha))
            .field("spa", Value::Ipv4(spa))
            .field("tha", Value::Mac(tha))
            .field("tpa", Value::Ipv4(tpa));
        ctx.emit(event);
        AnalyzeOutcome::Terminal
    }
}

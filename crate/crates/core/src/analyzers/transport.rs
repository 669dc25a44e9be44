//! Transport leaves. Packet-level analysis stops at the segment header:
//! ports and payload size are reported, reassembly is out of scope.

use crate::engine::{AnalyzeOutcome, Analyzer, Event, PacketContext, Span, Value};

use super::be16;

pub struct TcpAnalyzer;

impl Analyzer for TcpAnalyzer {
    fn name(&self) -> &str {
        "TCP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 20 {
            return AnalyzeOutcome::malformed("tcp header truncated");
        }
        let data_offset = ((b[12] >> 4) as usize) * 4;
        if data_offset < 20 {
            return AnalyzeOutcome::malformed("tcp data offset below minimum");
        }
        if data_offset > b.len() {
            return AnalyzeOutcome::malformed("tcp options truncated");
        }
        let event = Event::new("tcp_packet")
            .field("src_port", Value::U64(be16(b, 0) as u64))
            .field("dst_port", Value::U64(be16(b, 2) as u64))
            .field("payload_len", Value::U64((b.len() - data_offset) as u64));
        ctx.emit(event);
        AnalyzeOutcome::Terminal
    }
}

pub struct UdpAnalyzer;

impl Analyzer for UdpAnalyzer {
    fn name(&self) -> &str {
        "UDP"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 8 {
            return AnalyzeOutcome::malformed("udp header truncated");
        }
        let length = be16(b, 4) as usize;
        if length < 8 {
            return AnalyzeOutcome::malformed("udp length below header size");
        }
        if length > b.len() {
            return AnalyzeOutcome::malformed("udp payload truncated");
        }
        let event = Event::new("udp_packet")
            .field("src_port", Value::U64(be16(b, 0) as u64))
            .field("dst_port", Value::U64(be16(b, 2) as u64))
            .field("payload_len", Value::U64((length - 8) as u64));
        ctx.emit(event);
        AnalyzeOutcome::Terminal
    }
}

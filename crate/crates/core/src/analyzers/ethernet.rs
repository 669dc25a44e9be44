//! Ethernet frame dissection, including the 802.3 variants that share the
//! wire with Ethernet II.

use crate::dispatch::ProtocolId;
use crate::engine::{AnalyzeOutcome, Analyzer, PacketContext, Span};

use super::be16;

/// The four frame encodings distinguished by IEEE 802.3 clause 3.2.6 plus
/// the two de-facto variants that predate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameClass {
    /// type/length field >= 0x0600: the field is an EtherType.
    EthernetII,
    /// length-framed, payload starts with 0xFFFF: Novell raw IPX.
    NovellRaw,
    /// length-framed, payload starts with an 802.2 LLC header whose
    /// DSAP/SSAP are both 0xAA: SNAP extension carrying an EtherType.
    Snap,
    /// length-framed, any other 802.2 LLC header.
    Llc,
}

/// Classifies a frame from the type/length field and the first two payload
/// bytes. Total: every (u16, [u8; 2]) pair maps to exactly one class.
pub fn classify_frame(type_or_length: u16, payload_head: [u8; 2]) -> FrameClass {
    if type_or_length >= 0x0600 {
        return FrameClass::EthernetII;
    }
    match payload_head {
        [0xFF, 0xFF] => FrameClass::NovellRaw,
        [0xAA, 0xAA] => FrameClass::Snap,
        _ => FrameClass::Llc,
    }
}

pub struct EthernetAnalyzer {
    /// Optional forwarding identifier for plain LLC payloads.
    llc_child: Option<ProtocolId>,
    /// Optional forwarding identifier for Novell raw 802.3 payloads.
    novell_child: Option<ProtocolId>,
}

impl EthernetAnalyzer {
    pub fn new(llc_child: Option<ProtocolId>, novell_child: Option<ProtocolId>) -> Self {
        Self {
            llc_child,
            novell_child,
        }
    }
}

const HEADER_LEN: usize = 14;
const SNAP_HEADER_LEN: usize = 8; // LLC (3) + OUI (3) + EtherType (2)

impl Analyzer for EthernetAnalyzer {
    fn name(&self) -> &str {
        "ETHERNET"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let (dst, src) = {
            let b = ctx.bytes(span);
            if b.len() < HEADER_LEN {
                return AnalyzeOutcome::malformed("frame shorter than ethernet header");
            }
            let mut dst = [0u8; 6];
            let mut src = [0u8; 6];
            dst.copy_from_slice(&b[0..6]);
            src.copy_from_slice(&b[6..12]);
            (dst, src)
        };
        ctx.eth_dst = Some(dst);
        ctx.eth_src = Some(src);

        let b = ctx.bytes(span);
        let type_or_length = be16(b, 12);
        if type_or_length >= 0x0600 {
            return AnalyzeOutcome::Forward {
                next_id: type_or_length as ProtocolId,
                payload: span.from_offset(HEADER_LEN),
            };
        }
        // Length-framed 802.3: the payload's first bytes pick the variant.
        if b.len() < HEADER_LEN + 2 {
            return AnalyzeOutcome::malformed("802.3 frame too short to classify");
        }
        match classify_frame(type_or_length, [b[14], b[15]]) {
            FrameClass::EthernetII => unreachable!("handled above"),
            FrameClass::NovellRaw => match self.novell_child {
                Some(id) => AnalyzeOutcome::Forward {
                    next_id: id,
                    payload: span.from_offset(HEADER_LEN),
                },
                None => AnalyzeOutcome::Terminal,
            },
            FrameClass::Snap => {
                if b.len() < HEADER_LEN + SNAP_HEADER_LEN {
                    return AnalyzeOutcome::malformed("snap header truncated");
                }
                AnalyzeOutcome::Forward {
                    next_id: be16(b, 20) as ProtocolId,
                    payload: span.from_offset(HEADER_LEN + SNAP_HEADER_LEN),
                }
            }
            FrameClass::Llc => match self.llc_child {
                Some(id) => AnalyzeOutcome::Forward {
                    next_id: id,
                    payload: span.from_offset(HEADER_LEN),
                },
                None => AnalyzeOutcome::Terminal,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze(frame: &[u8]) -> (PacketContext, AnalyzeOutcome) {
        let a = EthernetAnalyzer::new(None, None);
        let mut ctx = PacketContext::new(0.0, 1, frame.to_vec());
        let whole = ctx.whole();
        let out = a.analyze(&mut ctx, whole);
        (ctx, out)
    }

    fn frame(ethertype: u16, payload: &[u8]) -> Vec<u8> {
        let mut f = vec![0x02, 0, 0, 0, 0, 1, 0x02, 0, 0, 0, 0, 2];
        f.extend_from_slice(&ethertype.to_be_bytes());
        f.extend_from_slice(payload);
        f
    }

    #[test]
    fn ethernet_ii_forwards_on_the_ethertype() {
        let (ctx, out) = analyze(&frame(0x0800, &[0u8; 20]));
        assert_eq!(ctx.eth_src, Some([0x02, 0, 0, 0, 0, 2]));
        assert_eq!(ctx.eth_dst, Some([0x02, 0, 0, 0, 0, 1]));
        match out {
            AnalyzeOutcome::Forward { next_id, payload } => {
                assert_eq!(next_id, 0x0800);
                assert_eq!(payload.start, 14);
                assert_eq!(payload.end, 34);
            }
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn classification_covers_every_variant() {
        assert_eq!(classify_frame(0x0800, [0x12, 0x34]), FrameClass::EthernetII);
        assert_eq!(classify_frame(0x0600, [0xFF, 0xFF]), FrameClass::EthernetII);
        assert_eq!(classify_frame(0x05FF, [0xFF, 0xFF]), FrameClass::NovellRaw);
        assert_eq!(classify_frame(0x0100, [0xAA, 0xAA]), FrameClass::Snap);
        assert_eq!(classify_frame(0x0100, [0x42, 0x42]), FrameClass::Llc);
        assert_eq!(classify_frame(0x0100, [0xAA, 0xAB]), FrameClass::Llc);
    }

    #[test]
    fn snap_forwards_on_the_inner_ethertype() {
        // 802.3 length framing, LLC AA AA 03, OUI 0, EtherType 0x0800.
        let mut payload = vec![0xAA, 0xAA, 0x03, 0, 0, 0, 0x08, 0x00];
        payload.extend_from_slice(&[0u8; 20]);
        let (_, out) = analyze(&frame(payload.len() as u16, &payload));
        match out {
            AnalyzeOutcome::Forward { next_id, payload } => {
                assert_eq!(next_id, 0x0800);
                assert_eq!(payload.start, 22);
            }
            other => panic!("expected forward, got {other:?}"),
        }
    }

    #[test]
    fn llc_without_a_configured_child_terminates() {
        let (_, out) = analyze(&frame(8, &[0x42, 0x42, 0x03, 0, 0, 0, 0, 0]));
        assert!(matches!(out, AnalyzeOutcome::Terminal));
    }

    #[test]
    fn short_frames_are_malformed() {
        assert!(matches!(
            analyze(&[0u8; 13]).1,
            AnalyzeOutcome::Malformed { .. }
        ));
        // 14-byte length-framed header with no payload to classify.
        assert!(matches!(
            analyze(&frame(0x0000, &[])).1,
            AnalyzeOutcome::Malformed { .. }
        ));
    }
}

//! Profinet real-time channel dissection (IEC 61158-6-10). The 2-byte
//! FrameID after the EtherType partitions the channel; this analyzer
//! decodes the acyclic DCP range used for device discovery and
//! configuration and notes cyclic RT class traffic without decoding it.

use crate::analyzers::{be16, be32};
use crate::engine::{AnalyzeOutcome, Analyzer, Event, PacketContext, Span, Value};

/// DCP service identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpService {
    Get,
    Set,
    Identify,
}

impl DcpService {
    fn from_id(id: u8) -> Option<Self> {
        match id {
            3 => Some(Self::Get),
            4 => Some(Self::Set),
            5 => Some(Self::Identify),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Get => "Get",
            Self::Set => "Set",
            Self::Identify => "Identify",
        }
    }
}

/// DCP service types: a request or one of the two response forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpServiceType {
    Request,
    ResponseSuccess,
    ResponseUnsupported,
}

impl DcpServiceType {
    fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::Request),
            1 => Some(Self::ResponseSuccess),
            5 => Some(Self::ResponseUnsupported),
            _ => None,
        }
    }
}

const FRAME_ID_DCP_LOW: u16 = 0xFEFC;
const FRAME_ID_DCP_HIGH: u16 = 0xFEFF;
const FRAME_ID_RTC_LOW: u16 = 0x8000;
const FRAME_ID_RTC_HIGH: u16 = 0xFBFF;

const OPTION_DEVICE_PROPERTIES: u8 = 2;
const SUBOPTION_NAME_OF_STATION: u8 = 2;

const DCP_HEADER_LEN: usize = 10;

pub struct ProfinetAnalyzer;

impl Analyzer for ProfinetAnalyzer {
    fn name(&self) -> &str {
        "PROFINET"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let b = ctx.bytes(span);
        if b.len() < 2 {
            return AnalyzeOutcome::malformed("pn-rt frame id truncated");
        }
        let frame_id = be16(b, 0);
        match frame_id {
            FRAME_ID_DCP_LOW..=FRAME_ID_DCP_HIGH => {
                let src = ctx.eth_src.unwrap_or([0; 6]);
                let dst = ctx.eth_dst.unwrap_or([0; 6]);
                match parse_dcp(&b[2..], src, dst) {
                    Ok(event) => {
                        ctx.emit(event);
                        AnalyzeOutcome::Terminal
                    }
                    Err(reason) => AnalyzeOutcome::Malformed { reason },
                }
            }
            FRAME_ID_RTC_LOW..=FRAME_ID_RTC_HIGH => {
                let event =
                    Event::new("pn_rtc_observed").field("frame_id", Value::Hex(frame_id as u64));
                ctx.emit(event);
                AnalyzeOutcome::Terminal
            }
            // Alarm and other acyclic ranges: out of scope, not an error.
            _ => AnalyzeOutcome::Terminal,
        }
    }
}

fn parse_dcp(b: &[u8], src: [u8; 6], dst: [u8; 6]) -> Result<Event, String> {
    if b.len() < DCP_HEADER_LEN {
        return Err("dcp header truncated".into());
    }
    let service =
        DcpService::from_id(b[0]).ok_or_else(|| format!("unknown dcp service id {}", b[0]))?;
    let service_type = DcpServiceType::from_id(b[1])
        .ok_or_else(|| format!("unknown dcp service type {}", b[1]))?;
    let xid = be32(b, 2);
    // bytes 6..8: response delay on requests, padding on responses
    let data_len = be16(b, 8) as usize;
    if DCP_HEADER_LEN + data_len > b.len() {
        return Err("dcp block data truncated".into());
    }
    let blocks = &b[DCP_HEADER_LEN..DCP_HEADER_LEN + data_len];
    let name = name_of_station(blocks, service, service_type)?;

    let event = match service_type {
        DcpServiceType::Request => Event::new("dcp_request")
            .field("src", Value::Mac(src))
            .field("dst", Value::Mac(dst))
            .field("service", Value::Str(service.label().into()))
            .field("xid", Value::Hex(xid as u64))
            .opt_field("name", name.map(Value::Str)),
        DcpServiceType::ResponseSuccess | DcpServiceType::ResponseUnsupported => {
            Event::new("dcp_response")
                .field("src", Value::Mac(src))
                .field("dst", Value::Mac(dst))
                .field("service", Value::Str(service.label().into()))
                .field(
                    "success",
                    Value::Bool(service_type == DcpServiceType::ResponseSuccess),
                )
                .field("xid", Value::Hex(xid as u64))
                .opt_field("name", name.map(Value::Str))
        }
    };
    Ok(event)
}

/// Walks the block list and extracts the first NameOfStation payload.
/// Blocks are (option, suboption, length)-framed and padded to even
/// offsets; the name payload is prefixed by a 2-byte qualifier in Set
/// requests and by 2 bytes of block info in responses.
fn name_of_station(
    blocks: &[u8],
    service: DcpService,
    service_type: DcpServiceType,
) -> Result<Option<String>, String> {
    let mut pos = 0usize;
    let mut name = None;
    while pos < blocks.len() {
        if pos + 4 > blocks.len() {
            return Err("dcp block header truncated".into());
        }
        let option = blocks[pos];
        let suboption = blocks[pos + 1];
        let block_len = be16(blocks, pos + 2) as usize;
        pos += 4;
        if pos + block_len > blocks.len() {
            return Err("dcp block payload truncated".into());
        }
        let payload = &blocks[pos..pos + block_len];
        pos += block_len;
        if block_len % 2 == 1 && pos < blocks.len() {
            pos += 1; // padding byte keeps blocks 16-bit aligned
        }
        if name.is_none()
            && option == OPTION_DEVICE_PROPERTIES
            && suboption == SUBOPTION_NAME_OF_STATION
        {
            let skip = match service_type {
                DcpServiceType::Request => match service {
                    // Set requests carry a 2-byte qualifier ahead of the value.
                    DcpService::Set => 2,
                    // Identify/Get request filters carry the bare value.
                    _ => 0,
                },
                // Responses carry 2 bytes of block info ahead of the value.
                _ => 2,
            };
            if payload.len() < skip {
                return Err("dcp name block shorter than its prefix".into());
            }
            name = Some(String::from_utf8_lossy(&payload[skip..]).into_owned());
        }
    }
    Ok(name)
}

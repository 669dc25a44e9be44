//! Encoders for the ICS analyzers: the BER subset, GOOSE frames, and
//! Profinet DCP payloads. Field layouts mirror the dissectors; the two
//! sides are kept honest by round-trip tests.

use super::frames::{ethernet, Mac};

/// Encodes one TLV with a definite length (short form, or long form with
/// one or two length bytes as needed).
pub fn ber_tlv(tag: u8, value: &[u8]) -> Vec<u8> {
    let mut out = vec![tag];
    match value.len() {
        0..=0x7F => out.push(value.len() as u8),
        0x80..=0xFF => {
            out.push(0x81);
            out.push(value.len() as u8);
        }
        _ => {
            assert!(value.len() <= 0xFFFF);
            out.push(0x82);
            out.extend_from_slice(&(value.len() as u16).to_be_bytes());
        }
    }
    out.extend_from_slice(value);
    out
}

/// Minimal-length unsigned INTEGER contents, zero-padded when the top bit
/// is set (the standard encoding for non-negative values).
pub fn ber_integer(v: u64) -> Vec<u8> {
    let bytes = v.to_be_bytes();
    let first = bytes.iter().position(|&b| b != 0).unwrap_or(7);
    let mut out = Vec::new();
    if bytes[first] & 0x80 != 0 {
        out.push(0);
    }
    out.extend_from_slice(&bytes[first..]);
    out
}

pub fn ber_bool(v: bool) -> Vec<u8> {
    vec![if v { 0xFF } else { 0x00 }]
}

pub fn ber_string(s: &str) -> Vec<u8> {
    s.as_bytes().to_vec()
}

/// Field values for one GOOSE frame; optional members are omitted from the
/// encoding entirely when `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GooseSpec {
    pub appid: u16,
    pub gocb_ref: String,
    pub time_allowed_to_live: Option<u64>,
    pub dat_set: String,
    pub go_id: Option<String>,
    pub t: Option<[u8; 8]>,
    pub st_num: u64,
    pub sq_num: u64,
    pub test: Option<bool>,
    pub conf_rev: Option<u64>,
    pub nds_com: Option<bool>,
    pub num_dat_set_entries: Option<u64>,
    pub all_data: Option<Vec<u8>>,
}

impl Default for GooseSpec {
    fn default() -> Self {
        Self {
            appid: 0x3001,
            gocb_ref: "relay1/LLN0$GO$gcb1".into(),
            time_allowed_to_live: Some(1000),
            dat_set: "relay1/LLN0$trips".into(),
            go_id: Some("trips".into()),
            t: Some([0; 8]),
            st_num: 1,
            sq_num: 0,
            test: Some(false),
            conf_rev: Some(1),
            nds_com: Some(false),
            num_dat_set_entries: Some(2),
            all_data: Some(vec![0x83, 0x01, 0x00, 0x83, 0x01, 0x01]),
        }
    }
}

/// The EtherType 0x88B8 payload: session header plus BER APDU.
pub fn goose_payload(spec: &GooseSpec) -> Vec<u8> {
    let mut fields = Vec::new();
    fields.extend(ber_tlv(0x80, &ber_string(&spec.gocb_ref)));
    if let Some(v) = spec.time_allowed_to_live {
        fields.extend(ber_tlv(0x81, &ber_integer(v)));
    }
    fields.extend(ber_tlv(0x82, &ber_string(&spec.dat_set)));
    if let Some(ref v) = spec.go_id {
        fields.extend(ber_tlv(0x83, &ber_string(v)));
    }
    if let Some(v) = spec.t {
        fields.extend(ber_tlv(0x84, &v));
    }
    fields.extend(ber_tlv(0x85, &ber_integer(spec.st_num)));
    fields.extend(ber_tlv(0x86, &ber_integer(spec.sq_num)));
    if let Some(v) = spec.test {
        fields.extend(ber_tlv(0x87, &ber_bool(v)));
    }
    if let Some(v) = spec.conf_rev {
        fields.extend(ber_tlv(0x88, &ber_integer(v)));
    }
    if let Some(v) = spec.nds_com {
        fields.extend(ber_tlv(0x89, &ber_bool(v)));
    }
    if let Some(v) = spec.num_dat_set_entries {
        fields.extend(ber_tlv(0x8A, &ber_integer(v)));
    }
    if let Some(ref v) = spec.all_data {
        fields.extend(ber_tlv(0xAB, v));
    }
    let apdu = ber_tlv(0x61, &fields);
    let mut payload = Vec::with_capacity(8 + apdu.len());
    payload.extend_from_slice(&spec.appid.to_be_bytes());
    payload.extend_from_slice(&((8 + apdu.len()) as u16).to_be_bytes());
    payload.extend_from_slice(&[0, 0, 0, 0]); // reserved
    payload.extend_from_slice(&apdu);
    payload
}

/// A complete GOOSE Ethernet frame to the conventional multicast group.
pub fn goose_frame(src: Mac, spec: &GooseSpec) -> Vec<u8> {
    ethernet([0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01], src, 0x88B8, &goose_payload(spec))
}

pub const FRAME_ID_DCP_GET_SET: u16 = 0xFEFD;
pub const FRAME_ID_DCP_IDENTIFY_REQUEST: u16 = 0xFEFE;
pub const FRAME_ID_DCP_IDENTIFY_RESPONSE: u16 = 0xFEFF;

/// One DCP block: option, suboption, big-endian length, payload, and a
/// padding byte when the payload length is odd.
pub fn dcp_block(option: u8, suboption: u8, payload: &[u8]) -> Vec<u8> {
    let mut b = vec![option, suboption];
    b.extend_from_slice(&(payload.len() as u16).to_be_bytes());
    b.extend_from_slice(payload);
    if payload.len() % 2 == 1 {
        b.push(0);
    }
    b
}

/// The EtherType 0x8892 payload of a DCP frame.
pub fn dcp_frame_payload(
    frame_id: u16,
    service_id: u8,
    service_type: u8,
    xid: u32,
    blocks: &[Vec<u8>],
) -> Vec<u8> {
    let data_len: usize = blocks.iter().map(Vec::len).sum();
    let mut p = Vec::with_capacity(12 + data_len);
    p.extend_from_slice(&frame_id.to_be_bytes());
    p.push(service_id);
    p.push(service_type);
    p.extend_from_slice(&xid.to_be_bytes());
    p.extend_from_slice(&[0, 0]); // response delay
    p.extend_from_slice(&(data_len as u16).to_be_bytes());
    for block in blocks {
        p.extend_from_slice(block);
    }
    p
}

fn name_of_station_block(prefix: &[u8], name: &str) -> Vec<u8> {
    let mut payload = prefix.to_vec();
    payload.extend_from_slice(name.as_bytes());
    dcp_block(2, 2, &payload) // Device Properties / Name of Station
}

/// Set request renaming a station: the name block carries a 2-byte
/// qualifier ahead of the value.
pub fn set_request_payload(xid: u32, new_name: &str) -> Vec<u8> {
    let block = name_of_station_block(&[0, 1], new_name);
    dcp_frame_payload(FRAME_ID_DCP_GET_SET, 4, 0, xid, &[block])
}

/// Set response, with no blocks; success selects the service type.
pub fn set_response_payload(xid: u32, success: bool) -> Vec<u8> {
    let service_type = if success { 1 } else { 5 };
    dcp_frame_payload(FRAME_ID_DCP_GET_SET, 4, service_type, xid, &[])
}

/// Identify request; a name filter becomes a bare name block.
pub fn identify_request_payload(xid: u32, name_filter: Option<&str>) -> Vec<u8> {
    let blocks: Vec<Vec<u8>> = name_filter
        .map(|n| vec![name_of_station_block(&[], n)])
        .unwrap_or_default();
    dcp_frame_payload(FRAME_ID_DCP_IDENTIFY_REQUEST, 5, 0, xid, &blocks)
}

/// Identify response announcing the responder's station name; the block
/// carries 2 bytes of block info ahead of the value.
pub fn identify_response_payload(xid: u32, name: &str) -> Vec<u8> {
    let block = name_of_station_block(&[0, 0], name);
    dcp_frame_payload(FRAME_ID_DCP_IDENTIFY_RESPONSE, 5, 1, xid, &[block])
}

/// Cyclic RT class data: frame id in the RTC range plus opaque io data.
pub fn pn_rtc_payload(frame_id: u16, io_data: &[u8]) -> Vec<u8> {
    assert!((0x8000..=0xFBFF).contains(&frame_id));
    let mut p = frame_id.to_be_bytes().to_vec();
    p.extend_from_slice(io_data);
    p
}

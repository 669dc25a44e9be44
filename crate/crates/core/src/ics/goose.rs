//! IEC 61850-8-1 GOOSE dissection.
//!
//! A GOOSE frame carries a small session header (APPID, length, two
//! reserved words) followed by a BER-encoded `goosePdu` under application
//! tag 1. Publishers repeat each state with an incrementing sqNum and bump
//! stNum on a state change, which is what the detector layer watches.

use crate::engine::{AnalyzeOutcome, Analyzer, Event, PacketContext, Span, Value};

use super::ber::{integer_u64, parse_tlvs, Tlv};

/// Decoded goosePdu fields. Optional members stay `None` when the element
/// is absent; unrecognized context tags are skipped for forward
/// compatibility.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoosePdu {
    pub appid: u16,
    pub gocb_ref: String,
    pub time_allowed_to_live: Option<u64>,
    pub dat_set: String,
    pub go_id: Option<String>,
    /// UtcTime timestamp, kept as the raw 8 bytes.
    pub t: Option<[u8; 8]>,
    pub st_num: u64,
    pub sq_num: u64,
    pub test: Option<bool>,
    pub conf_rev: Option<u64>,
    pub nds_com: Option<bool>,
    pub num_dat_set_entries: Option<u64>,
    /// The allData sequence, undecoded.
    pub all_data: Vec<u8>,
}

const SESSION_HEADER_LEN: usize = 8;
const TAG_GOOSE_PDU: u8 = 0x61; // [APPLICATION 1] constructed

fn int_field(tlv: Tlv<'_>, what: &str) -> Result<u64, String> {
    integer_u64(tlv.value).ok_or_else(|| format!("goose {what} is not an integer"))
}

fn bool_field(tlv: Tlv<'_>, what: &str) -> Result<bool, String> {
    match tlv.value {
        [b] => Ok(*b != 0),
        _ => Err(format!("goose {what} is not a boolean")),
    }
}

fn str_field(tlv: Tlv<'_>) -> String {
    String::from_utf8_lossy(tlv.value).into_owned()
}

/// Parses the analyzer's input span: session header plus APDU. Trailing
/// bytes past the declared length (Ethernet minimum-frame padding) are
/// ignored.
pub fn parse_goose(payload: &[u8]) -> Result<GoosePdu, String> {
    if payload.len() < SESSION_HEADER_LEN {
        return Err("goose session header truncated".into());
    }
    let appid = u16::from_be_bytes([payload[0], payload[1]]);
    let length = u16::from_be_bytes([payload[2], payload[3]]) as usize;
    if length < SESSION_HEADER_LEN {
        return Err("goose length below session header size".into());
    }
    if length > payload.len() {
        return Err("goose apdu truncated".into());
    }
    let apdu = &payload[SESSION_HEADER_LEN..length];
    let top = parse_tlvs(apdu).map_err(|e| e.to_string())?;
    let pdu_tlv = match top.as_slice() {
        [one] if one.tag == TAG_GOOSE_PDU => *one,
        _ => return Err("expected a single goosePdu application element".into()),
    };
    let mut pdu = GoosePdu {
        appid,
        ..GoosePdu::default()
    };
    let (mut saw_gocb, mut saw_dat_set, mut saw_st, mut saw_sq) = (false, false, false, false);
    for tlv in parse_tlvs(pdu_tlv.value).map_err(|e| e.to_string())? {
        match tlv.tag {
            0x80 => {
                pdu.gocb_ref = str_field(tlv);
                saw_gocb = true;
            }
            0x81 => pdu.time_allowed_to_live = Some(int_field(tlv, "timeAllowedtoLive")?),
            0x82 => {
                pdu.dat_set = str_field(tlv);
                saw_dat_set = true;
            }
            0x83 => pdu.go_id = Some(str_field(tlv)),
            0x84 => {
                let raw: [u8; 8] = tlv
                    .value
                    .try_into()
                    .map_err(|_| "goose timestamp is not 8 bytes".to_string())?;
                pdu.t = Some(raw);
            }
            0x85 => {
                pdu.st_num = int_field(tlv, "stNum")?;
                saw_st = true;
            }
            0x86 => {
                pdu.sq_num = int_field(tlv, "sqNum")?;
                saw_sq = true;
            }
            0x87 => pdu.test = Some(bool_field(tlv, "test")?),
            0x88 => pdu.conf_rev = Some(int_field(tlv, "confRev")?),
            0x89 => pdu.nds_com = Some(bool_field(tlv, "ndsCom")?),
            0x8A => pdu.num_dat_set_entries = Some(int_field(tlv, "numDatSetEntries")?),
            0xAB => pdu.all_data = tlv.value.to_vec(),
            _ => {}
        }
    }
    for (seen, field) in [
        (saw_gocb, "gocbRef"),
        (saw_dat_set, "datSet"),
        (saw_st, "stNum"),
        (saw_sq, "sqNum"),
    ] {
        if !seen {
            return Err(format!("goose pdu missing mandatory {field}"));
        }
    }
    Ok(pdu)
}

pub struct GooseAnalyzer;

impl Analyzer for GooseAnalyzer {
    fn name(&self) -> &str {
        "GOOSE"
    }

    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
        let pdu = match parse_goose(ctx.bytes(span)) {
            Ok(pdu) => pdu,
            Err(reason) => return AnalyzeOutcome::Malformed { reason },
        };
        let src = ctx.eth_src.unwrap_or([0; 6]);
        let event = Event::new("goose_message")
            .field("src", Value::Mac(src))
            .field("appid", Value::Hex(pdu.appid as u64))
            .field("gocbRef", Value::Str(pdu.gocb_ref))
            .opt_field("timeAllowedtoLive", pdu.time_allowed_to_live.map(Value::U64))
            .field("datSet", Value::Str(pdu.dat_set))
            .opt_field("goID", pdu.go_id.map(Value::Str))
            .field("stNum", Value::U64(pdu.st_num))
            .field("sqNum", Value::U64(pdu.sq_num))
            .opt_field("test", pdu.test.map(Value::Bool))
            .opt_field("confRev", pdu.conf_rev.map(Value::U64))
            .opt_field("ndsCom", pdu.nds_com.map(Value::Bool))
            .opt_field("numDatSetEntries", pdu.num_dat_set_entries.map(Value::U64))
            .field("all_data_len", Value::U64(pdu.all_data.len() as u64));
        ctx.emit(event);
        AnalyzeOutcome::Terminal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tlv(tag: u8, value: &[u8]) -> Vec<u8> {
        assert!(value.len() < 0x80);
        let mut out = vec![tag, value.len() as u8];
        out.extend_from_slice(value);
        out
    }

    fn sample_payload() -> Vec<u8> {
        let mut fields = Vec::new();
        fields.extend(tlv(0x80, b"relay1/LLN0$GO$gcb1"));
        fields.extend(tlv(0x81, &[0x03, 0xE8])); // 1000 ms
        fields.extend(tlv(0x82, b"relay1/LLN0$trips"));
        fields.extend(tlv(0x83, b"trips"));
        fields.extend(tlv(0x84, &[0u8; 8]));
        fields.extend(tlv(0x85, &[0x04])); // stNum 4
        fields.extend(tlv(0x86, &[0x00])); // sqNum 0
        fields.extend(tlv(0x87, &[0x00])); // test false
        fields.extend(tlv(0x88, &[0x01]));
        fields.extend(tlv(0x89, &[0x00]));
        fields.extend(tlv(0x8A, &[0x02]));
        fields.extend(tlv(0xAB, &[0x83, 0x01, 0x00, 0x83, 0x01, 0x01]));
        let apdu = tlv(TAG_GOOSE_PDU, &fields);
        let mut payload = Vec::new();
        payload.extend_from_slice(&0x3001u16.to_be_bytes());
        payload.extend_from_slice(&((SESSION_HEADER_LEN + apdu.len()) as u16).to_be_bytes());
        payload.extend_from_slice(&[0, 0, 0, 0]);
        payload.extend_from_slice(&apdu);
        payload
    }

    #[test]
    fn parses_a_full_pdu() {
        let pdu = parse_goose(&sample_payload()).unwrap();
        assert_eq!(pdu.appid, 0x3001);
        assert_eq!(pdu.gocb_ref, "relay1/LLN0$GO$gcb1");
        assert_eq!(pdu.time_allowed_to_live, Some(1000));
        assert_eq!(pdu.dat_set, "relay1/LLN0$trips");
        assert_eq!(pdu.go_id.as_deref(), Some("trips"));
        assert_eq!(pdu.st_num, 4);
        assert_eq!(pdu.sq_num, 0);
        assert_eq!(pdu.test, Some(false));
        assert_eq!(pdu.conf_rev, Some(1));
        assert_eq!(pdu.nds_com, Some(false));
        assert_eq!(pdu.num_dat_set_entries, Some(2));
        assert_eq!(pdu.all_data.len(), 6);
    }

    #[test]
    fn padding_past_the_declared_length_is_ignored() {
        let mut payload = sample_payload();
        payload.extend_from_slice(&[0u8; 18]);
        assert!(parse_goose(&payload).is_ok());
    }

    #[test]
    fn missing_mandatory_fields_are_rejected() {
        // rebuild without stNum
        let mut fields = Vec::new();
        fields.extend(tlv(0x80, b"gcb"));
        fields.extend(tlv(0x82, b"ds"));
        fields.extend(tlv(0x86, &[0x00]));
        let apdu = tlv(TAG_GOOSE_PDU, &fields);
        let mut payload = vec![0, 1];
        payload.extend_from_slice(&((SESSION_HEADER_LEN + apdu.len()) as u16).to_be_bytes());
        payload.extend_from_slice(&[0; 4]);
        payload.extend_from_slice(&apdu);
        let err = parse_goose(&payload).unwrap_err();
        assert!(err.contains("stNum"), "error was: {err}");
    }

    #[test]
    fn header_inconsistencies_are_rejected() {
        assert!(parse_goose(&[0; 7]).is_err());
        let mut payload = sample_payload();
        payload[3] = 4; // length below the session header size
        assert!(parse_goose(&payload).is_err());
        let mut payload = sample_payload();
        payload.truncate(payload.len() - 4); // apdu cut short
        assert!(parse_goose(&payload).is_err());
    }

    #[test]
    fn analyzer_emits_the_decoded_event() {
        let mut ctx = PacketContext::new(0.0, 1, sample_payload());
        ctx.eth_src = Some([0x01, 0x0C, 0xCD, 0x01, 0x00, 0x01]);
        let whole = ctx.whole();
        assert!(matches!(
            GooseAnalyzer.analyze(&mut ctx, whole),
            AnalyzeOutcome::Terminal
        ));
        let ev = &ctx.events[0];
        assert_eq!(ev.name, "goose_message");
        assert_eq!(ev.get("stNum").and_then(Value::as_u64), Some(4));
        assert_eq!(
            ev.get("datSet").and_then(Value::as_str),
            Some("relay1/LLN0$trips")
        );
    }
}

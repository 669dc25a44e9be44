//! The BER subset used by IEC 61850 link-layer PDUs: single-byte tags and
//! definite lengths only. GOOSE frames are small and flat, so anything
//! outside that subset is treated as an encoding error rather than decoded.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BerError {
    #[error("multi-byte tag at offset {at}")]
    LongFormTag { at: usize },
    #[error("indefinite length at offset {at}")]
    IndefiniteLength { at: usize },
    #[error("length of more than two bytes at offset {at}")]
    LengthTooWide { at: usize },
    #[error("element truncated at offset {at}")]
    Truncated { at: usize },
}

/// One tag-length-value element; `value` borrows from the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tlv<'a> {
    pub tag: u8,
    pub value: &'a [u8],
}

fn parse_one(input: &[u8], pos: usize) -> Result<(Tlv<'_>, usize), BerError> {
    let tag = input[pos];
    if tag & 0x1F == 0x1F {
        return Err(BerError::LongFormTag { at: pos });
    }
    let mut p = pos + 1;
    let first = *input.get(p).ok_or(BerError::Truncated { at: pos })?;
    p += 1;
    let len = match first {
        0x00..=0x7F => first as usize,
        0x80 => return Err(BerError::IndefiniteLength { at: pos + 1 }),
        0x81 => {
            let b = *input.get(p).ok_or(BerError::Truncated { at: pos })?;
            p += 1;
            b as usize
        }
        0x82 => {
            if p + 2 > input.len() {
                return Err(BerError::Truncated { at: pos });
            }
            let len = u16::from_be_bytes([input[p], input[p + 1]]) as usize;
            p += 2;
            len
        }
        _ => return Err(BerError::LengthTooWide { at: pos + 1 }),
    };
    if p + len > input.len() {
        return Err(BerError::Truncated { at: pos });
    }
    Ok((
        Tlv {
            tag,
            value: &input[p..p + len],
        },
        p + len,
    ))
}

/// Parses a sequence of TLVs covering the whole input exactly.
pub fn parse_tlvs(input: &[u8]) -> Result<Vec<Tlv<'_>>, BerError> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < input.len() {
        let (tlv, next) = parse_one(input, pos)?;
        out.push(tlv);
        pos = next;
    }
    Ok(out)
}

/// Decodes a BER INTEGER value as unsigned, up to 8 significant bytes.
pub fn integer_u64(value: &[u8]) -> Option<u64> {
    if value.is_empty() {
        return None;
    }
    let trimmed = match value.iter().position(|&b| b != 0) {
        Some(i) => &value[i..],
        None => return Some(0),
    };
    if trimmed.len() > 8 {
        return None;
    }
    Some(trimmed.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_and_long_definite_lengths() {
        let mut input = vec![0x85, 0x02, 0xAA, 0xBB]; // short form
        input.extend_from_slice(&[0x86, 0x81, 0x01, 0xCC]); // 0x81 one-byte
        let mut wide = vec![0x87, 0x82, 0x00, 0x03];
        wide.extend_from_slice(&[1, 2, 3]);
        input.extend_from_slice(&wide); // 0x82 two-byte
        let tlvs = parse_tlvs(&input).unwrap();
        assert_eq!(tlvs.len(), 3);
        assert_eq!(tlvs[0], Tlv { tag: 0x85, value: &[0xAA, 0xBB] });
        assert_eq!(tlvs[1], Tlv { tag: 0x86, value: &[0xCC] });
        assert_eq!(tlvs[2].value, &[1, 2, 3]);
    }

    #[test]
    fn rejects_the_unsupported_encodings() {
        assert_eq!(
            parse_tlvs(&[0x30, 0x80, 0x00, 0x00]),
            Err(BerError::IndefiniteLength { at: 1 })
        );
        assert_eq!(
            parse_tlvs(&[0x1F, 0x85, 0x01, 0x00]),
            Err(BerError::LongFormTag { at: 0 })
        );
        assert_eq!(
            parse_tlvs(&[0x85, 0x83, 0x00, 0x00, 0x01, 0xAA]),
            Err(BerError::LengthTooWide { at: 1 })
        );
        assert_eq!(
            parse_tlvs(&[0x85, 0x05, 0x01]),
            Err(BerError::Truncated { at: 0 })
        );
        assert_eq!(parse_tlvs(&[0x85]), Err(BerError::Truncated { at: 0 }));
    }

    #[test]
    fn integers_decode_unsigned_big_endian() {
        assert_eq!(integer_u64(&[0x00]), Some(0));
        assert_eq!(integer_u64(&[0x2A]), Some(42));
        assert_eq!(integer_u64(&[0x01, 0x00]), Some(256));
        // leading zero pad for values with the high bit set
        assert_eq!(integer_u64(&[0x00, 0xFF]), Some(255));
        assert_eq!(integer_u64(&[0x00, 0x00, 0x00]), Some(0));
        assert_eq!(integer_u64(&u64::MAX.to_be_bytes()), Some(u64::MAX));
        assert_eq!(integer_u64(&[0x01; 9]), None);
        assert_eq!(integer_u64(&[]), None);
    }
}

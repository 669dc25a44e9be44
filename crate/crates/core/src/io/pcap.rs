//! Classic pcap capture file reader.
//!
//! Handles the original 24-byte-header format in both byte orders, with
//! microsecond or nanosecond timestamps. The newer block-structured capture
//! format is out of scope.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use thiserror::Error;

/// Magic of a microsecond-timestamp capture, as written natively.
pub const MAGIC_MICROS: u32 = 0xa1b2_c3d4;
/// Magic of a nanosecond-timestamp capture.
pub const MAGIC_NANOS: u32 = 0xa1b2_3c4d;

/// Guard against absurd record lengths from corrupt files.
const MAX_RECORD_LEN: u32 = 1 << 26;

#[derive(Error, Debug)]
pub enum PcapError {
    #[error("capture read failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a classic capture file (magic {magic:#010x})")]
    BadMagic { magic: u32 },
    #[error("capture file shorter than its global header")]
    TruncatedHeader,
    #[error("record {index} truncated")]
    TruncatedRecord { index: usize },
    #[error("record {index} claims {len} bytes, above the sanity limit")]
    OversizedRecord { index: usize, len: u32 },
}

/// One captured packet.
#[derive(Clone, Debug, PartialEq)]
pub struct CaptureRecord {
    /// Capture timestamp in seconds since the epoch.
    pub time: f64,
    /// Link type of the capture the record came from.
    pub link_type: u32,
    /// Original wire length.
    pub original_len: u32,
    /// Captured bytes (`data.len() <= original_len`).
    pub data: Vec<u8>,
}

pub struct PcapReader<R> {
    src: R,
    big_endian: bool,
    nanos: bool,
    link_type: u32,
    snap_len: u32,
    index: usize,
    done: bool,
}

impl PcapReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, PcapError> {
        Self::new(BufReader::new(File::open(path)?))
    }
}

impl<R: Read> PcapReader<R> {
    pub fn new(mut src: R) -> Result<Self, PcapError> {
        let mut header = [0u8; 24];
        read_exact_or(&mut src, &mut header, PcapError::TruncatedHeader)?;
        let raw_magic = u32::from_le_bytes(header[0..4].try_into().unwrap());
        let (big_endian, nanos) = match raw_magic {
            MAGIC_MICROS => (false, false),
            MAGIC_NANOS => (false, true),
            m if m.swap_bytes() == MAGIC_MICROS => (true, false),
            m if m.swap_bytes() == MAGIC_NANOS => (true, true),
            m => return Err(PcapError::BadMagic { magic: m }),
        };
        let field = |bytes: &[u8]| -> u32 {
            let arr: [u8; 4] = bytes.try_into().unwrap();
            if big_endian {
                u32::from_be_bytes(arr)
            } else {
                u32::from_le_bytes(arr)
            }
        };
        let snap_len = field(&header[16..20]);
        let link_type = field(&header[20..24]);
        Ok(Self {
            src,
            big_endian,
            nanos,
            link_type,
            snap_len,
            index: 0,
            done: false,
        })
    }

    pub fn link_type(&self) -> u32 {
        self.link_type
    }

    pub fn snap_len(&self) -> u32 {
        self.snap_len
    }

    fn read_u32(buf: &[u8], big_endian: bool) -> u32 {
        let arr: [u8; 4] = buf.try_into().unwrap();
        if big_endian {
            u32::from_be_bytes(arr)
        } else {
            u32::from_le_bytes(arr)
        }
    }

    fn next_record(&mut self) -> Result<Option<CaptureRecord>, PcapError> {
        let mut header = [0u8; 16];
        match self.src.read(&mut header)? {
            0 => return Ok(None),
            n if n < header.len() => {
                // Partial record header: top up or report truncation.
                let mut got = n;
                while got < header.len() {
                    let read = self.src.read(&mut header[got..])?;
                    if read == 0 {
                        return Err(PcapError::TruncatedRecord { index: self.index });
                    }
                    got += read;
                }
            }
            _ => {}
        }
        let ts_sec = Self::read_u32(&header[0..4], self.big_endian);
        let ts_frac = Self::read_u32(&header[4..8], self.big_endian);
        let captured_len = Self::read_u32(&header[8..12], self.big_endian);
        let original_len = Self::read_u32(&header[12..16], self.big_endian);
        if captured_len > MAX_RECORD_LEN {
            return Err(PcapError::OversizedRecord {
                index: self.index,
                len: captured_len,
            });
        }
        let mut data = vec![0u8; captured_len as usize];
        read_exact_or(
            &mut self.src,
            &mut data,
            PcapError::TruncatedRecord { index: self.index },
        )?;
        let divisor = if self.nanos { 1e9 } else { 1e6 };
        let record = CaptureRecord {
            time: ts_sec as f64 + ts_frac as f64 / divisor,
            link_type: self.link_type,
            original_len: original_len.max(captured_len),
            data,
        };
        self.index += 1;
        Ok(Some(record))
    }
}

fn read_exact_or<R: Read>(src: &mut R, buf: &mut [u8], on_eof: PcapError) -> Result<(), PcapError> {
    match src.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(on_eof),
        Err(e) => Err(e.into()),
    }
}

impl<R: Read> Iterator for PcapReader<R> {
    type Item = Result<CaptureRecord, PcapError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_record() {
            Ok(Some(record)) => Some(Ok(record)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

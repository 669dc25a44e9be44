//! Classic pcap capture writer, configurable in byte order and timestamp
//! resolution to exercise every reader path.

use std::io::{self, Write};

use crate::io::{MAGIC_MICROS, MAGIC_NANOS};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PcapByteOrder {
    Little,
    Big,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PcapTimestamps {
    Micros,
    Nanos,
}

pub struct PcapWriter<W: Write> {
    dst: W,
    order: PcapByteOrder,
    timestamps: PcapTimestamps,
}

impl<W: Write> PcapWriter<W> {
    pub fn new(dst: W, link_type: u32) -> io::Result<Self> {
        Self::with_format(dst, link_type, PcapByteOrder::Little, PcapTimestamps::Micros)
    }

    pub fn with_format(
        dst: W,
        link_type: u32,
        order: PcapByteOrder,
        timestamps: PcapTimestamps,
    ) -> io::Result<Self> {
        let mut w = Self {
            dst,
            order,
            timestamps,
        };
        let magic = match timestamps {
            PcapTimestamps::Micros => MAGIC_MICROS,
            PcapTimestamps::Nanos => MAGIC_NANOS,
        };
        w.u32(magic)?;
        w.u16(2)?; // major
        w.u16(4)?; // minor
        w.u32(0)?; // thiszone
        w.u32(0)?; // sigfigs
        w.u32(65535)?; // snaplen
        w.u32(link_type)?;
        Ok(w)
    }

    pub fn push(&mut self, time: f64, data: &[u8]) -> io::Result<()> {
        let secs = time.floor();
        let frac = time - secs;
        let scale = match self.timestamps {
            PcapTimestamps::Micros => 1e6,
            PcapTimestamps::Nanos => 1e9,
        };
        self.u32(secs as u32)?;
        self.u32((frac * scale).round() as u32)?;
        self.u32(data.len() as u32)?;
        self.u32(data.len() as u32)?;
        self.dst.write_all(data)
    }

    pub fn into_inner(self) -> W {
        self.dst
    }

    fn u32(&mut self, v: u32) -> io::Result<()> {
        let bytes = match self.order {
            PcapByteOrder::Little => v.to_le_bytes(),
            PcapByteOrder::Big => v.to_be_bytes(),
        };
        self.dst.write_all(&bytes)
    }

    fn u16(&mut self, v: u16) -> io::Result<()> {
        let bytes = match self.order {
            PcapByteOrder::Little => v.to_le_bytes(),
            PcapByteOrder::Big => v.to_be_bytes(),
        };
        self.dst.write_all(&bytes)
    }
}

/// Builds a little-endian microsecond capture in memory.
pub fn write_pcap(link_type: u32, records: &[(f64, Vec<u8>)]) -> Vec<u8> {
    let mut writer =
        PcapWriter::new(Vec::new(), link_type).expect("writing to memory cannot fail");
    for (time, data) in records {
        writer.push(*time, data).expect("writing to memory cannot fail");
    }
    writer.into_inner()
}

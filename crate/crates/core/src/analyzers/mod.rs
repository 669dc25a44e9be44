//! The traditional packet-level stack: link-layer, tunneling, and IP
//! dissectors, plus the terminal transport leaves.
//!
//! All byte layouts are network byte order. Every dissector is a stateless
//! singleton: per-packet state lives in the `PacketContext`, and outputs are
//! layer records, events, and a forwarding decision.

mod arp;
mod ethernet;
mod gre;
mod ip;
mod misc;
mod mpls;
mod ppp;
mod transport;
mod vlan;

pub use arp::ArpAnalyzer;
pub use ethernet::{classify_frame, EthernetAnalyzer, FrameClass};
pub use gre::GreAnalyzer;
pub use ip::IpAnalyzer;
pub use misc::{LinuxSllAnalyzer, NullAnalyzer, SkipAnalyzer, SKIP_CHILD_ID};
pub use mpls::{decode_mpls_entry, MplsAnalyzer, MplsEntry};
pub use ppp::{PppAnalyzer, PppoeAnalyzer};
pub use transport::{TcpAnalyzer, UdpAnalyzer};
pub use vlan::{decode_tci, VlanAnalyzer, VlanTag};

pub(crate) fn be16(b: &[u8], off: usize) -> u16 {
    u16::from_be_bytes([b[off], b[off + 1]])
}

pub(crate) fn be32(b: &[u8], off: usize) -> u32 {
    u32::from_be_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

//! Synthetic traffic: frame builders, capture-file writing, and generated
//! workloads. Everything here is the counterpart of a dissector or reader
//! elsewhere in the crate and doubles as its test oracle.

mod frames;
mod ics;
mod pcap;
mod realistic;

pub use frames::{
    arp_message, ethernet, ethernet_8023, gre, ipv4, ipv4_with_options, ipv6, linux_sll,
    llc_frame, mpls_payload, null_frame, pppoe_discovery, pppoe_session, ppp_payload,
    snap_frame, tcp_segment, udp_datagram, vlan_payload, Ipv6Ext, Mac,
};
pub use ics::{
    ber_bool, ber_integer, ber_string, ber_tlv, dcp_block, dcp_frame_payload, goose_frame,
    goose_payload, identify_request_payload, identify_response_payload, pn_rtc_payload,
    set_request_payload, set_response_payload, GooseSpec, FRAME_ID_DCP_GET_SET,
    FRAME_ID_DCP_IDENTIFY_REQUEST, FRAME_ID_DCP_IDENTIFY_RESPONSE,
};
pub use pcap::{write_pcap, PcapByteOrder, PcapTimestamps, PcapWriter};
pub use realistic::realistic_capture;

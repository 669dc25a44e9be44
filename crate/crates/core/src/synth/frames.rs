//! Frame and header builders for every dissector in the crate. Checksums
//! are written as zero throughout: the analyzers never verify them.

pub type Mac = [u8; 6];

pub fn ethernet(dst: Mac, src: Mac, ethertype: u16, payload: &[u8]) -> Vec<u8> {
    let mut f = Vec::with_capacity(14 + payload.len());
    f.extend_from_slice(&dst);
    f.extend_from_slice(&src);
    f.extend_from_slice(&ethertype.to_be_bytes());
    f.extend_from_slice(payload);
    f
}

/// Length-framed 802.3: the type/length field holds the payload length.
pub fn ethernet_8023(dst: Mac, src: Mac, payload: &[u8]) -> Vec<u8> {
    assert!(payload.len() < 0x0600, "length framing requires < 0x0600");
    ethernet(dst, src, payload.len() as u16, payload)
}

/// 802.2 LLC payload for a length-framed carrier.
pub fn llc_frame(dst: Mac, src: Mac, dsap: u8, ssap: u8, body: &[u8]) -> Vec<u8> {
    let mut p = vec![dsap, ssap, 0x03];
    p.extend_from_slice(body);
    ethernet_8023(dst, src, &p)
}

/// 802.2 SNAP payload carrying an EtherType.
pub fn snap_frame(dst: Mac, src: Mac, oui: [u8; 3], ethertype: u16, body: &[u8]) -> Vec<u8> {
    let mut p = vec![0xAA, 0xAA, 0x03];
    p.extend_from_slice(&oui);
    p.extend_from_slice(&ethertype.to_be_bytes());
    p.extend_from_slice(body);
    ethernet_8023(dst, src, &p)
}

/// The body that follows a 0x8100 EtherType: TCI, inner type, payload.
pub fn vlan_payload(tci: u16, ethertype: u16, payload: &[u8]) -> Vec<u8> {
    let mut p = Vec::with_capacity(4 + payload.len());
    p.extend_from_slice(&tci.to_be_bytes());
    p.extend_from_slice(&ethertype.to_be_bytes());
    p.extend_from_slice(payload);
    p
}

/// A label stack followed by its payload; bottom-of-stack is set on the
/// last entry.
pub fn mpls_payload(labels: &[(u32, u8, u8)], payload: &[u8]) -> Vec<u8> {
    assert!(!labels.is_empty());
    let mut p = Vec::with_capacity(labels.len() * 4 + payload.len());
    for (i, &(label, tc, ttl)) in labels.iter().enumerate() {
        let bottom = (i + 1 == labels.len()) as u32;
        let word = (label << 12) | ((tc as u32) << 9) | (bottom << 8) | ttl as u32;
        p.extend_from_slice(&word.to_be_bytes());
    }
    p.extend_from_slice(payload);
    p
}

/// PPPoE session-stage payload: the PPP protocol field counts toward the
/// declared length.
pub fn pppoe_session(session_id: u16, ppp_proto: u16, body: &[u8]) -> Vec<u8> {
    let mut p = vec![0x11, 0x00];
    p.extend_from_slice(&session_id.to_be_bytes());
    p.extend_from_slice(&((body.len() + 2) as u16).to_be_bytes());
    p.extend_from_slice(&ppp_proto.to_be_bytes());
    p.extend_from_slice(body);
    p
}

/// PPPoE discovery-stage payload (PADI and friends): tags only.
pub fn pppoe_discovery(code: u8, session_id: u16, tags: &[u8]) -> Vec<u8> {
    let mut p = vec![0x11, code];
    p.extend_from_slice(&session_id.to_be_bytes());
    p.extend_from_slice(&(tags.len() as u16).to_be_bytes());
    p.extend_from_slice(tags);
    p
}

pub fn ppp_payload(proto: u16, body: &[u8], hdlc_framing: bool) -> Vec<u8> {
    let mut p = Vec::new();
    if hdlc_framing {
        p.extend_from_slice(&[0xFF, 0x03]);
    }
    p.extend_from_slice(&proto.to_be_bytes());
    p.extend_from_slice(body);
    p
}

pub fn arp_message(op: u16, sha: Mac, spa: [u8; 4], tha: Mac, tpa: [u8; 4]) -> Vec<u8> {
    let mut m = Vec::with_capacity(28);
    m.extend_from_slice(&1u16.to_be_bytes()); // hardware: ethernet
    m.extend_from_slice(&0x0800u16.to_be_bytes()); // protocol: ipv4
    m.push(6);
    m.push(4);
    m.extend_from_slice(&op.to_be_bytes());
    m.extend_from_slice(&sha);
    m.extend_from_slice(&spa);
    m.extend_from_slice(&tha);
    m.extend_from_slice(&tpa);
    m
}

pub fn ipv4(proto: u8, src: [u8; 4], dst: [u8; 4], payload: &[u8]) -> Vec<u8> {
    ipv4_with_options(proto, src, dst, &[], payload)
}

pub fn ipv4_with_options(
    proto: u8,
    src: [u8; 4],
    dst: [u8; 4],
    options: &[u8],
    payload: &[u8],
) -> Vec<u8> {
    assert!(options.len() % 4 == 0 && options.len() <= 40);
    let header_len = 20 + options.len();
    let total_len = header_len + payload.len();
    let mut p = vec![0u8; header_len];
    p[0] = 0x40 | (header_len / 4) as u8;
    p[2..4].copy_from_slice(&(total_len as u16).to_be_bytes());
    p[8] = 64; // ttl
    p[9] = proto;
    p[12..16].copy_from_slice(&src);
    p[16..20].copy_from_slice(&dst);
    p[20..header_len].copy_from_slice(options);
    p.extend_from_slice(payload);
    p
}

/// One extension header in an IPv6 chain.
#[derive(Clone, Copy, Debug)]
pub struct Ipv6Ext {
    /// 0 hop-by-hop, 43 routing, 44 fragment, 60 destination options.
    pub header_type: u8,
    /// Extra 8-byte units beyond the first (ignored for fragments, which
    /// are fixed-size).
    pub extra_units: u8,
}

pub fn ipv6(
    src: [u8; 16],
    dst: [u8; 16],
    exts: &[Ipv6Ext],
    upper: u8,
    payload: &[u8],
) -> Vec<u8> {
    let mut body = Vec::new();
    for (i, ext) in exts.iter().enumerate() {
        let next = exts.get(i + 1).map_or(upper, |e| e.header_type);
        let units = if ext.header_type == 44 { 0 } else { ext.extra_units };
        let len = (units as usize + 1) * 8;
        let mut h = vec![0u8; len];
        h[0] = next;
        h[1] = units;
        body.extend_from_slice(&h);
    }
    body.extend_from_slice(payload);
    let mut p = vec![0u8; 40];
    p[0] = 0x60;
    p[4..6].copy_from_slice(&(body.len() as u16).to_be_bytes());
    p[6] = exts.first().map_or(upper, |e| e.header_type);
    p[7] = 64; // hop limit
    p[8..24].copy_from_slice(&src);
    p[24..40].copy_from_slice(&dst);
    p.extend_from_slice(&body);
    p
}

pub fn gre(checksum: bool, key: Option<u32>, sequence: Option<u32>, proto: u16, payload: &[u8]) -> Vec<u8> {
    let mut flags = 0u16;
    if checksum {
        flags |= 0x8000;
    }
    if key.is_some() {
        flags |= 0x2000;
    }
    if sequence.is_some() {
        flags |= 0x1000;
    }
    let mut p = Vec::new();
    p.extend_from_slice(&flags.to_be_bytes());
    p.extend_from_slice(&proto.to_be_bytes());
    if checksum {
        p.extend_from_slice(&[0u8; 4]);
    }
    if let Some(k) = key {
        p.extend_from_slice(&k.to_be_bytes());
    }
    if let Some(s) = sequence {
        p.extend_from_slice(&s.to_be_bytes());
    }
    p.extend_from_slice(payload);
    p
}

pub fn tcp_segment(src_port: u16, dst_port: u16, payload: &[u8]) -> Vec<u8> {
    let mut s = vec![0u8; 20];
    s[0..2].copy_from_slice(&src_port.to_be_bytes());
    s[2..4].copy_from_slice(&dst_port.to_be_bytes());
    s[12] = 5 << 4;
    s[13] = 0x10; // ACK
    s[14..16].copy_from_slice(&1024u16.to_be_bytes()); // window
    s.extend_from_slice(payload);
    s
}

pub fn udp_datagram(src_port: u16, dst_port: u16, payload: &[u8]) -> Vec<u8> {
    let mut d = Vec::with_capacity(8 + payload.len());
    d.extend_from_slice(&src_port.to_be_bytes());
    d.extend_from_slice(&dst_port.to_be_bytes());
    d.extend_from_slice(&((payload.len() + 8) as u16).to_be_bytes());
    d.extend_from_slice(&[0, 0]); // checksum unset
    d.extend_from_slice(payload);
    d
}

/// Linux cooked capture header for link type 113.
pub fn linux_sll(protocol: u16, payload: &[u8]) -> Vec<u8> {
    let mut f = vec![0u8; 16];
    f[0..2].copy_from_slice(&0u16.to_be_bytes()); // packet type: to us
    f[2..4].copy_from_slice(&1u16.to_be_bytes()); // ARPHRD_ETHER
    f[4..6].copy_from_slice(&6u16.to_be_bytes()); // address length
    f[14..16].copy_from_slice(&protocol.to_be_bytes());
    f.extend_from_slice(payload);
    f
}

/// BSD loopback frame for link type 0.
pub fn null_frame(family: u32, payload: &[u8], opposite_endian: bool) -> Vec<u8> {
    let mut f = if opposite_endian {
        family.to_be_bytes().to_vec()
    } else {
        family.to_le_bytes().to_vec()
    };
    f.extend_from_slice(payload);
    f
}

//! A generated capture matching the realistic benchmark mix, for running
//! the full pipeline over traffic whose layer structure is known exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{realistic_plan, RealisticPacket};

use super::frames::{arp_message, ethernet, ipv4, tcp_segment, udp_datagram, vlan_payload, Mac};
use super::pcap::PcapWriter;

const DST_PORTS: [u16; 5] = [80, 443, 53, 123, 5353];

fn mac(rng: &mut ChaCha8Rng) -> Mac {
    [0x02, 0, 0, 0, 0, rng.random_range(1..=16)]
}

fn addr(rng: &mut ChaCha8Rng) -> [u8; 4] {
    [10, 0, rng.random_range(0..4), rng.random_range(1..=254)]
}

fn body(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let len = rng.random_range(0..=32);
    (0..len).map(|_| rng.random()).collect()
}

fn build(packet: RealisticPacket, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let (dst, src) = (mac(rng), mac(rng));
    match packet {
        RealisticPacket::Tcp => {
            let seg = tcp_segment(rng.random_range(49152..=65535), DST_PORTS[rng.random_range(0..5)], &body(rng));
            ethernet(dst, src, 0x0800, &ipv4(6, addr(rng), addr(rng), &seg))
        }
        RealisticPacket::Udp => {
            let dgram = udp_datagram(rng.random_range(49152..=65535), DST_PORTS[rng.random_range(0..5)], &body(rng));
            ethernet(dst, src, 0x0800, &ipv4(17, addr(rng), addr(rng), &dgram))
        }
        RealisticPacket::VlanTcp => {
            let seg = tcp_segment(rng.random_range(49152..=65535), DST_PORTS[rng.random_range(0..5)], &body(rng));
            let inner = ipv4(6, addr(rng), addr(rng), &seg);
            ethernet(dst, src, 0x8100, &vlan_payload(rng.random_range(1..=64), 0x0800, &inner))
        }
        RealisticPacket::Arp => {
            let spa = addr(rng);
            let mut tpa = spa;
            tpa[3] = tpa[3].wrapping_add(1).max(1);
            ethernet(
                [0xFF; 6],
                src,
                0x0806,
                &arp_message(1, src, spa, [0; 6], tpa),
            )
        }
    }
}

/// Builds an in-memory Ethernet capture whose dispatch structure matches
/// the realistic benchmark trace for the same pdu count and seed: the plan
/// comes from the same generator stream, packet contents from another.
pub fn realistic_capture(pdu_count: usize, seed: u64) -> Vec<u8> {
    let effective = pdu_count - pdu_count % 3;
    let mut plan_rng = ChaCha8Rng::seed_from_u64(seed);
    plan_rng.set_stream(1);
    let plan = realistic_plan(effective, &mut plan_rng);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut writer = PcapWriter::new(Vec::with_capacity(effective * 32), 1)
        .expect("writing to memory cannot fail");
    let start = 1_000_000_000.0;
    for (i, packet) in plan.into_iter().enumerate() {
        let data = build(packet, &mut rng);
        writer
            .push(start + i as f64 * 50e-6, &data)
            .expect("writing to memory cannot fail");
    }
    writer.into_inner()
}

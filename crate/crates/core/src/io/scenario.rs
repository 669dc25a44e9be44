//! Benchmark scenario generation: identifier mappings and layer traces,
//! both deterministic functions of the scenario seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dispatch::{AnalyzerRef, IdentifierMapping, ProtocolId};
use crate::scenario_ids::{
    sample_fragmented_extra_ids, CONCISE_BENCH_IDS, RANDOM_ID_MAX,
};

use super::LayerTrace;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MappingKind {
    /// The identifiers reachable in the default configuration.
    Concise,
    /// Concise plus 100 extra identifiers spread over the randomized range.
    Fragmented,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrafficKind {
    /// A typical traffic mix: mostly plain TCP, some UDP, a little VLAN
    /// and ARP.
    Realistic,
    /// Three identifiers per packet, drawn uniformly from the randomized
    /// range. A worst case for locality and branch prediction.
    Randomized,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchScenario {
    pub mapping: MappingKind,
    pub traffic: TrafficKind,
    /// Requested total identifier count; rounded down to a multiple of
    /// three so realistic and randomized traces of one run stay comparable.
    pub pdu_count: usize,
    pub seed: u64,
}

/// Builds the scenario's identifier mapping. References are synthetic:
/// the position of the id in the sorted set.
pub fn scenario_mapping(kind: MappingKind, seed: u64) -> IdentifierMapping {
    let mut ids: Vec<ProtocolId> = CONCISE_BENCH_IDS.to_vec();
    if kind == MappingKind::Fragmented {
        ids.extend(sample_fragmented_extra_ids(seed));
        ids.sort_unstable();
    }
    let entries = ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, AnalyzerRef::from_index(i)));
    IdentifierMapping::from_entries(entries).expect("scenario ids are distinct")
}

/// Packet shapes of the realistic traffic mix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RealisticPacket {
    /// Ethernet, IPv4, TCP.
    Tcp,
    /// Ethernet, IPv4, UDP.
    Udp,
    /// Ethernet, VLAN, IPv4, TCP.
    VlanTcp,
    /// Ethernet, ARP.
    Arp,
}

impl RealisticPacket {
    /// Identifiers dispatched while walking this packet: link type, then
    /// one id per encapsulation.
    pub fn dispatch_ids(self) -> &'static [ProtocolId] {
        match self {
            RealisticPacket::Tcp => &[1, 0x0800, 6],
            RealisticPacket::Udp => &[1, 0x0800, 17],
            RealisticPacket::VlanTcp => &[1, 0x8100, 0x0800, 6],
            RealisticPacket::Arp => &[1, 0x0806],
        }
    }

    pub fn pdu_len(self) -> usize {
        self.dispatch_ids().len()
    }

    fn draw(rng: &mut ChaCha8Rng) -> Self {
        match rng.random_range(0..100u32) {
            0..80 => RealisticPacket::Tcp,
            80..92 => RealisticPacket::Udp,
            92..97 => RealisticPacket::VlanTcp,
            _ => RealisticPacket::Arp,
        }
    }
}

/// Draws the packet sequence of a realistic trace totalling exactly
/// `pdu_count` identifiers (caller pre-rounds to a multiple of three).
pub fn realistic_plan(pdu_count: usize, rng: &mut ChaCha8Rng) -> Vec<RealisticPacket> {
    let mut plan = Vec::with_capacity(pdu_count / 3 + 1);
    let mut remaining = pdu_count;
    while remaining >= 4 {
        let p = RealisticPacket::draw(rng);
        plan.push(p);
        remaining -= p.pdu_len();
    }
    // Exact-fit tail. A remainder of one is absorbed by regrowing the last
    // drawn packet.
    match remaining {
        0 => {}
        2 => plan.push(RealisticPacket::Arp),
        3 => plan.push(RealisticPacket::Tcp),
        1 => {
            let last = plan.pop().expect("remainder 1 implies a prior packet");
            match last.pdu_len() + 1 {
                3 => plan.push(RealisticPacket::Tcp),
                4 => plan.push(RealisticPacket::VlanTcp),
                5 => {
                    plan.push(RealisticPacket::Tcp);
                    plan.push(RealisticPacket::Arp);
                }
                _ => unreachable!(),
            }
        }
        _ => unreachable!(),
    }
    plan
}

/// Generates mapping and trace for a scenario. Identical scenarios produce
/// identical output; mapping sampling and traffic drawing use separate
/// streams of the seeded generator.
pub fn generate_scenario(s: &BenchScenario) -> (IdentifierMapping, LayerTrace) {
    let mapping = scenario_mapping(s.mapping, s.seed);
    let effective = s.pdu_count - s.pdu_count % 3;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    rng.set_stream(1);
    let mut trace = LayerTrace::new();
    match s.traffic {
        TrafficKind::Realistic => {
            for packet in realistic_plan(effective, &mut rng) {
                trace.push_packet(packet.dispatch_ids());
            }
        }
        TrafficKind::Randomized => {
            let mut layers = [0u32; 3];
            for _ in 0..effective / 3 {
                for slot in &mut layers {
                    *slot = rng.random_range(1..=RANDOM_ID_MAX);
                }
                trace.push_packet(&layers);
            }
        }
    }
    (mapping, trace)
}

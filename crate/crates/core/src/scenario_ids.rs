// Identifier sets used by the benchmark scenarios.
//
// This file is `include!`d by the build script as well as compiled into the
// library, so it must stay self-contained: the build script generates the
// hard-coded switch tables from exactly the same constants and sampling
// logic the runtime scenario generator uses.

/// Seed used when none is given on the command line. The hard-coded switch
/// for the fragmented mapping is generated for this seed at build time.
pub const DEFAULT_SEED: u64 = 42;

/// Number of extra identifiers the fragmented mapping adds on top of the
/// concise set.
pub const FRAGMENTED_EXTRA_COUNT: usize = 100;

/// Upper bound (inclusive) of the randomized identifier range.
pub const RANDOM_ID_MAX: u32 = 10_000;

/// Every identifier reachable in the default configuration, deduplicated
/// across id spaces: capture link types, EtherTypes, PPP protocol numbers,
/// IP protocol numbers and loopback address families. Sorted ascending.
pub const CONCISE_BENCH_IDS: &[u32] = &[
    0,      // link type: BSD loopback
    1,      // link type: Ethernet
    2,      // loopback family: AF_INET
    4,      // IP protocol: IP-in-IP
    6,      // IP protocol: TCP
    9,      // link type: PPP
    17,     // IP protocol: UDP
    24,     // loopback family: AF_INET6 (BSD)
    28,     // loopback family: AF_INET6 (FreeBSD)
    30,     // loopback family: AF_INET6 (macOS)
    33,     // PPP protocol: IPv4 (0x0021)
    41,     // IP protocol: IPv6 encapsulation
    47,     // IP protocol: GRE
    87,     // PPP protocol: IPv6 (0x0057)
    113,    // link type: Linux cooked capture
    2048,   // EtherType: IPv4 (0x0800)
    2054,   // EtherType: ARP (0x0806)
    25944,  // EtherType: transparent Ethernet bridging (0x6558)
    32821,  // EtherType: RARP (0x8035)
    33024,  // EtherType: 802.1Q VLAN (0x8100)
    34525,  // EtherType: IPv6 (0x86DD)
    34887,  // EtherType: MPLS unicast (0x8847)
    34916,  // EtherType: PPPoE session (0x8864)
    34962,  // EtherType: Profinet (0x8892)
    34984,  // EtherType: 802.1ad QinQ (0x88A8)
    35000,  // EtherType: GOOSE (0x88B8)
    35001,  // EtherType: GOOSE management (0x88B9)
    37120,  // EtherType: legacy QinQ (0x9100)
];

/// Draws the extra identifiers of the fragmented mapping: distinct values
/// from `1..=RANDOM_ID_MAX` that are not already in the concise set.
/// Deterministic for a given seed.
pub fn sample_fragmented_extra_ids(seed: u64) -> Vec<u32> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<u32> = Vec::with_capacity(FRAGMENTED_EXTRA_COUNT);
    while picked.len() < FRAGMENTED_EXTRA_COUNT {
        let id = rng.random_range(1..=RANDOM_ID_MAX);
        if CONCISE_BENCH_IDS.binary_search(&id).is_ok() || picked.contains(&id) {
            continue;
        }
        picked.push(id);
    }
    picked
}

//! Concrete lookup structure implementations.
//!
//! Every structure answers `lookup(id) -> Option<AnalyzerRef>` for arbitrary
//! 32-bit identifiers, including ids the mapping never contained. Hash-based
//! structures therefore store the key next to the reference and compare on
//! lookup.

use std::collections::BTreeMap;
use std::hash::Hasher;
use std::mem::size_of;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siphasher::sip::SipHasher24;

use super::hard_coded::{self, HardCodedSwitch};
use super::{AnalyzerRef, DispatchError, DispatchStrategy, IdentifierMapping, ProtocolId};

/// One table slot. The niche in `AnalyzerRef` keeps this at 8 bytes, so a
/// zeroed allocation is a valid empty table.
pub(super) type Slot = Option<AnalyzerRef>;

const _: () = assert!(size_of::<Slot>() == 8);

/// Keyed slot for hash tables that must reject unmapped identifiers.
type KeyedSlot = Option<(ProtocolId, AnalyzerRef)>;

/// Id space covered by the static array.
const STATIC_ID_SPACE: usize = 1 << 16;

/// Upper bound on dynamic array slots; guards against degenerate mappings
/// like {0, u32::MAX} allocating gigabytes.
const DYNAMIC_MAX_SLOTS: u64 = 1 << 28;

/// Identifiers this close together share one array-tree node.
const ARRAY_TREE_MAX_GAP: u32 = 16;

/// Node counts up to this search linearly instead of bisecting.
const ARRAY_TREE_LINEAR_MAX: usize = 32;

/// Evictions per cuckoo insert before the table is rehashed.
const CUCKOO_MAX_EVICTIONS: usize = 500;

/// Rehash rounds at one size before the cuckoo tables grow.
const CUCKOO_REHASH_ROUNDS: usize = 32;

/// Total multiplier draws across all table sizes before universal hash
/// construction gives up.
const UNIVERSAL_ATTEMPT_BUDGET: usize = 1_000_000;

/// Multiplier draws at one table size before the universal hash table
/// doubles.
const UNIVERSAL_LEVEL_ATTEMPTS: usize = 200_000;

/// Displacement values tried per bucket before perfect hash construction
/// gives up.
const PERFECT_DISPLACE_LIMIT: usize = 1_000_000;

#[inline]
fn mult_shift(id: ProtocolId, a: u64, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        (a.wrapping_mul(id as u64) >> (64 - bits)) as usize
    }
}

/// Keyed hash of one identifier. Identifiers come straight out of packet
/// bytes, so the bucketed structures (chaining, cuckoo) run them through a
/// keyed PRF instead of using the raw value: a sender must not be able to
/// craft identifier sets that pile into one chain or force eviction cycles.
#[inline]
fn keyed_hash(k0: u64, k1: u64, id: ProtocolId) -> u64 {
    let mut h = SipHasher24::new_with_keys(k0, k1);
    h.write_u32(id);
    h.finish()
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

pub(super) enum Storage {
    Static(StaticArray),
    Dynamic(DynamicArray),
    Tree(TreeMap),
    ArrayTree(ArrayTree),
    Chain(SeparateChaining),
    Cuckoo(CuckooHash),
    Universal(UniversalHash),
    Perfect(PerfectHash),
    HardCoded(HardCodedSwitch),
}

impl Storage {
    pub(super) fn build(
        mapping: &IdentifierMapping,
        strategy: DispatchStrategy,
        seed: u64,
    ) -> Result<Self, DispatchError> {
        Ok(match strategy {
            DispatchStrategy::StaticArray => Storage::Static(StaticArray::build(mapping)?),
            DispatchStrategy::DynamicArray => Storage::Dynamic(DynamicArray::build(mapping)?),
            DispatchStrategy::TreeMap => Storage::Tree(TreeMap::build(mapping)),
            DispatchStrategy::ArrayTree => Storage::ArrayTree(ArrayTree::build(mapping)),
            DispatchStrategy::SeparateChaining => {
                Storage::Chain(SeparateChaining::build(mapping, seed))
            }
            DispatchStrategy::CuckooHash => Storage::Cuckoo(CuckooHash::build(mapping, seed)?),
            DispatchStrategy::UniversalHash => {
                Storage::Universal(UniversalHash::build(mapping, seed)?)
            }
            DispatchStrategy::PerfectHash => Storage::Perfect(PerfectHash::build(mapping)?),
            DispatchStrategy::HardCodedSwitch => {
                Storage::HardCoded(hard_coded::build(mapping)?)
            }
        })
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        match self {
            Storage::Static(t) => t.lookup(id),
            Storage::Dynamic(t) => t.lookup(id),
            Storage::Tree(t) => t.lookup(id),
            Storage::ArrayTree(t) => t.lookup(id),
            Storage::Chain(t) => t.lookup(id),
            Storage::Cuckoo(t) => t.lookup(id),
            Storage::Universal(t) => t.lookup(id),
            Storage::Perfect(t) => t.lookup(id),
            Storage::HardCoded(t) => t.lookup(id),
        }
    }

    pub(super) fn storage_bytes(&self) -> usize {
        match self {
            Storage::Static(t) => t.storage_bytes(),
            Storage::Dynamic(t) => t.storage_bytes(),
            Storage::Tree(t) => t.storage_bytes(),
            Storage::ArrayTree(t) => t.storage_bytes(),
            Storage::Chain(t) => t.storage_bytes(),
            Storage::Cuckoo(t) => t.storage_bytes(),
            Storage::Universal(t) => t.storage_bytes(),
            Storage::Perfect(t) => t.storage_bytes(),
            Storage::HardCoded(t) => t.storage_bytes(),
        }
    }

    pub(super) fn layout_digest(&self) -> u64 {
        let mut h = Fnv::new();
        match self {
            Storage::Static(t) => {
                h.write_u64(1);
                digest_slots(&mut h, &t.slots);
            }
            Storage::Dynamic(t) => {
                h.write_u64(2);
                h.write_u64(t.base as u64);
                digest_slots(&mut h, &t.slots);
            }
            Storage::Tree(t) => {
                h.write_u64(3);
                for (id, r) in &t.map {
                    h.write_u64(*id as u64);
                    h.write_u64(r.get());
                }
            }
            Storage::ArrayTree(t) => {
                h.write_u64(4);
                for node in &t.nodes {
                    h.write_u64(node.base as u64);
                    digest_slots(&mut h, &node.slots);
                }
            }
            Storage::Chain(t) => {
                h.write_u64(5);
                h.write_u64(t.k0);
                h.write_u64(t.k1);
                h.write_u64(t.buckets.len() as u64);
                for (i, bucket) in t.buckets.iter().enumerate() {
                    let mut cur = bucket.as_deref();
                    while let Some(node) = cur {
                        h.write_u64(i as u64);
                        h.write_u64(node.key as u64);
                        h.write_u64(node.value.get());
                        cur = node.next.as_deref();
                    }
                }
            }
            Storage::Cuckoo(t) => {
                h.write_u64(6);
                for (k0, k1) in t.keys {
                    h.write_u64(k0);
                    h.write_u64(k1);
                }
                h.write_u64(t.bits as u64);
                digest_keyed(&mut h, &t.first);
                digest_keyed(&mut h, &t.second);
            }
            Storage::Universal(t) => {
                h.write_u64(7);
                h.write_u64(t.a);
                h.write_u64(t.bits as u64);
                digest_keyed(&mut h, &t.table);
            }
            Storage::Perfect(t) => {
                h.write_u64(8);
                for d in &t.displace {
                    h.write_u64(*d as u64);
                }
                digest_keyed(&mut h, &t.table);
            }
            Storage::HardCoded(t) => {
                h.write_u64(9);
                h.write_u64(t.table_index() as u64);
                digest_slots(&mut h, t.refs());
            }
        }
        h.0
    }
}

fn digest_slots(h: &mut Fnv, slots: &[Slot]) {
    h.write_u64(slots.len() as u64);
    for (i, slot) in slots.iter().enumerate() {
        if let Some(r) = slot {
            h.write_u64(i as u64);
            h.write_u64(r.get());
        }
    }
}

fn digest_keyed(h: &mut Fnv, slots: &[KeyedSlot]) {
    h.write_u64(slots.len() as u64);
    for (i, slot) in slots.iter().enumerate() {
        if let Some((k, r)) = slot {
            h.write_u64(i as u64);
            h.write_u64(*k as u64);
            h.write_u64(r.get());
        }
    }
}

pub(super) struct StaticArray {
    slots: Box<[Slot]>,
}

impl StaticArray {
    fn build(mapping: &IdentifierMapping) -> Result<Self, DispatchError> {
        if let Some(&(id, _)) = mapping
            .entries()
            .iter()
            .find(|(id, _)| *id as usize >= STATIC_ID_SPACE)
        {
            return Err(DispatchError::IdentifierOutOfRange {
                id,
                limit: STATIC_ID_SPACE as u64,
            });
        }
        let mut slots = vec![None; STATIC_ID_SPACE].into_boxed_slice();
        for &(id, r) in mapping.entries() {
            slots[id as usize] = Some(r);
        }
        Ok(Self { slots })
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        *self.slots.get(id as usize)?
    }

    fn storage_bytes(&self) -> usize {
        self.slots.len() * size_of::<Slot>()
    }
}

pub(super) struct DynamicArray {
    base: ProtocolId,
    slots: Box<[Slot]>,
}

impl DynamicArray {
    fn build(mapping: &IdentifierMapping) -> Result<Self, DispatchError> {
        let base = mapping.min_id().expect("non-empty");
        let max = mapping.max_id().expect("non-empty");
        let span = (max - base) as u64 + 1;
        if span > DYNAMIC_MAX_SLOTS {
            return Err(DispatchError::SpanTooLarge { span });
        }
        let mut slots = vec![None; span as usize].into_boxed_slice();
        for &(id, r) in mapping.entries() {
            slots[(id - base) as usize] = Some(r);
        }
        Ok(Self { base, slots })
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        *self.slots.get(id.wrapping_sub(self.base) as usize)?
    }

    fn storage_bytes(&self) -> usize {
        self.slots.len() * size_of::<Slot>()
    }
}

pub(super) struct TreeMap {
    map: BTreeMap<ProtocolId, AnalyzerRef>,
}

impl TreeMap {
    fn build(mapping: &IdentifierMapping) -> Self {
        Self {
            map: mapping.entries().iter().copied().collect(),
        }
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        self.map.get(&id).copied()
    }

    fn storage_bytes(&self) -> usize {
        // Estimate from node geometry: up to 11 entries per node, nodes run
        // roughly three quarters full, each node carries key and value
        // arrays plus header.
        let node_bytes = 11 * (size_of::<ProtocolId>() + size_of::<AnalyzerRef>()) + 16;
        let nodes = self.map.len().div_ceil(8).max(1);
        nodes * node_bytes
    }
}

struct ArrayNode {
    base: ProtocolId,
    slots: Box<[Slot]>,
}

pub(super) struct ArrayTree {
    /// Node base ids, parallel to `nodes`: the search scans this dense
    /// array instead of striding over node headers.
    bases: Vec<ProtocolId>,
    nodes: Vec<ArrayNode>,
}

impl ArrayTree {
    fn build(mapping: &IdentifierMapping) -> Self {
        let entries = mapping.entries();
        let mut nodes = Vec::new();
        let mut group: Vec<(ProtocolId, AnalyzerRef)> = Vec::new();
        for &(id, r) in entries {
            if let Some(&(prev, _)) = group.last() {
                if id - prev > ARRAY_TREE_MAX_GAP {
                    nodes.push(Self::close_group(&group));
                    group.clear();
                }
            }
            group.push((id, r));
        }
        if !group.is_empty() {
            nodes.push(Self::close_group(&group));
        }
        let bases = nodes.iter().map(|n| n.base).collect();
        Self { bases, nodes }
    }

    fn close_group(group: &[(ProtocolId, AnalyzerRef)]) -> ArrayNode {
        let base = group[0].0;
        let span = (group[group.len() - 1].0 - base) as usize + 1;
        let mut slots = vec![None; span].into_boxed_slice();
        for &(id, r) in group {
            slots[(id - base) as usize] = Some(r);
        }
        ArrayNode { base, slots }
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        // Last node with base <= id. Typical graphs produce a handful of
        // nodes, where a forward scan costs one mispredict instead of one
        // per bisection level; bisect only on larger trees.
        let idx = if self.bases.len() <= ARRAY_TREE_LINEAR_MAX {
            let mut i = 0;
            while i < self.bases.len() && self.bases[i] <= id {
                i += 1;
            }
            i
        } else {
            self.bases.partition_point(|&b| b <= id)
        };
        let node = self.nodes[..idx].last()?;
        *node.slots.get((id - node.base) as usize)?
    }

    fn storage_bytes(&self) -> usize {
        self.bases.len() * size_of::<ProtocolId>()
            + self.nodes.len() * size_of::<ArrayNode>()
            + self
                .nodes
                .iter()
                .map(|n| n.slots.len() * size_of::<Slot>())
                .sum::<usize>()
    }
}

struct ChainNode {
    key: ProtocolId,
    value: AnalyzerRef,
    next: Option<Box<ChainNode>>,
}

pub(super) struct SeparateChaining {
    buckets: Box<[Option<Box<ChainNode>>]>,
    entries: usize,
    k0: u64,
    k1: u64,
}

/// Bucket counts, one prime per growth step.
const BUCKET_PRIMES: &[usize] = &[
    2, 3, 5, 7, 11, 13, 17, 23, 29, 37, 47, 59, 71, 89, 107, 131, 163, 197, 239, 293, 353, 431,
    521, 631, 761, 919, 1103, 1327, 1597, 1931, 2333, 2801, 3371, 4049, 4861, 5839, 7013, 8419,
    10103, 12143, 14591, 17519, 21023, 25229, 30293, 36353, 43627, 52361, 62851, 75431, 90523,
    108631, 130363, 156437, 187751, 225307, 270371, 324449, 389357, 467237, 560689,
];

fn bucket_count_for(entries: usize) -> usize {
    for &p in BUCKET_PRIMES {
        if p >= entries {
            return p;
        }
    }
    // Beyond the table: search odd numbers by trial division.
    let mut candidate = entries | 1;
    loop {
        let mut d = 3;
        let mut prime = candidate % 2 != 0;
        while prime && d * d <= candidate {
            if candidate % d == 0 {
                prime = false;
            }
            d += 2;
        }
        if prime {
            return candidate;
        }
        candidate += 2;
    }
}

impl SeparateChaining {
    fn build(mapping: &IdentifierMapping, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k0 = rng.random::<u64>();
        let k1 = rng.random::<u64>();
        let count = bucket_count_for(mapping.len());
        let mut buckets: Vec<Option<Box<ChainNode>>> = Vec::new();
        buckets.resize_with(count, || None);
        let mut buckets = buckets.into_boxed_slice();
        for &(id, r) in mapping.entries() {
            let idx = (keyed_hash(k0, k1, id) % count as u64) as usize;
            let node = Box::new(ChainNode {
                key: id,
                value: r,
                next: buckets[idx].take(),
            });
            buckets[idx] = Some(node);
        }
        Self {
            buckets,
            entries: mapping.len(),
            k0,
            k1,
        }
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        let idx = (keyed_hash(self.k0, self.k1, id) % self.buckets.len() as u64) as usize;
        let mut cur = self.buckets[idx].as_deref();
        while let Some(node) = cur {
            if node.key == id {
                return Some(node.value);
            }
            cur = node.next.as_deref();
        }
        None
    }

    fn storage_bytes(&self) -> usize {
        self.buckets.len() * size_of::<Option<Box<ChainNode>>>()
            + self.entries * size_of::<ChainNode>()
    }
}

pub(super) struct CuckooHash {
    keys: [(u64, u64); 2],
    bits: u32,
    first: Box<[KeyedSlot]>,
    second: Box<[KeyedSlot]>,
}

#[inline]
fn keyed_index(k: (u64, u64), id: ProtocolId, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        (keyed_hash(k.0, k.1, id) >> (64 - bits)) as usize
    }
}

impl CuckooHash {
    fn build(mapping: &IdentifierMapping, seed: u64) -> Result<Self, DispatchError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bits = ceil_log2(mapping.len());
        let mut total_rounds = 0usize;
        loop {
            let size = 1usize << bits;
            let mut rounds = 0;
            'rehash: loop {
                let keys = [
                    (rng.random::<u64>(), rng.random::<u64>()),
                    (rng.random::<u64>(), rng.random::<u64>()),
                ];
                let mut first = vec![None; size].into_boxed_slice();
                let mut second = vec![None; size].into_boxed_slice();
                for &(id, r) in mapping.entries() {
                    if Self::insert(&mut first, &mut second, keys, bits, id, r).is_err() {
                        rounds += 1;
                        total_rounds += 1;
                        if rounds >= CUCKOO_REHASH_ROUNDS {
                            break 'rehash;
                        }
                        continue 'rehash;
                    }
                }
                return Ok(Self {
                    keys,
                    bits,
                    first,
                    second,
                });
            }
            bits += 1;
            if bits > 28 {
                return Err(DispatchError::HashConstructionFailed {
                    attempts: total_rounds,
                });
            }
        }
    }

    fn insert(
        first: &mut [KeyedSlot],
        second: &mut [KeyedSlot],
        keys: [(u64, u64); 2],
        bits: u32,
        key: ProtocolId,
        value: AnalyzerRef,
    ) -> Result<(), ()> {
        let mut key = key;
        let mut value = value;
        let mut into_first = true;
        for _ in 0..=CUCKOO_MAX_EVICTIONS {
            let (table, k) = if into_first {
                (&mut *first, keys[0])
            } else {
                (&mut *second, keys[1])
            };
            let slot = keyed_index(k, key, bits);
            match table[slot].replace((key, value)) {
                None => return Ok(()),
                Some((k, v)) => {
                    key = k;
                    value = v;
                    into_first = !into_first;
                }
            }
        }
        Err(())
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        if let Some((k, r)) = self.first[keyed_index(self.keys[0], id, self.bits)] {
            if k == id {
                return Some(r);
            }
        }
        if let Some((k, r)) = self.second[keyed_index(self.keys[1], id, self.bits)] {
            if k == id {
                return Some(r);
            }
        }
        None
    }

    fn storage_bytes(&self) -> usize {
        (self.first.len() + self.second.len()) * size_of::<KeyedSlot>()
    }
}

pub(super) struct UniversalHash {
    a: u64,
    bits: u32,
    table: Box<[KeyedSlot]>,
}

impl UniversalHash {
    fn build(mapping: &IdentifierMapping, seed: u64) -> Result<Self, DispatchError> {
        let n = mapping.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Start with a quarter-loaded table and double it whenever one
        // size exhausts its share of the budget. Small mappings resolve at
        // the first size in a handful of draws; sizes where an injective
        // multiplier is a one-in-millions event trade memory for a findable
        // one instead of burning the whole budget in one place.
        let mut bits = ceil_log2(4 * n).max(1);
        let mut spent = 0usize;
        while spent < UNIVERSAL_ATTEMPT_BUDGET && bits <= 28 {
            let level_budget = (UNIVERSAL_ATTEMPT_BUDGET - spent).min(UNIVERSAL_LEVEL_ATTEMPTS);
            let size = 1usize << bits;
            let mut marks = vec![0u32; size];
            for epoch in 1..=level_budget as u32 {
                let a = rng.random::<u64>() | 1;
                let mut injective = true;
                for &(id, _) in mapping.entries() {
                    let slot = mult_shift(id, a, bits);
                    if marks[slot] == epoch {
                        injective = false;
                        break;
                    }
                    marks[slot] = epoch;
                }
                if injective {
                    let mut table = vec![None; size].into_boxed_slice();
                    for &(id, r) in mapping.entries() {
                        table[mult_shift(id, a, bits)] = Some((id, r));
                    }
                    return Ok(Self { a, bits, table });
                }
            }
            spent += level_budget;
            bits += 1;
        }
        Err(DispatchError::HashConstructionFailed { attempts: spent })
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        match self.table[mult_shift(id, self.a, self.bits)] {
            Some((k, r)) if k == id => Some(r),
            _ => None,
        }
    }

    fn storage_bytes(&self) -> usize {
        self.table.len() * size_of::<KeyedSlot>()
    }
}

pub(super) struct PerfectHash {
    displace: Box<[i32]>,
    table: Box<[KeyedSlot]>,
}

/// Intermediate hash: FNV-1a over the big-endian id bytes seeded with the
/// displacement value, finished with an avalanche. Plain FNV-1a keeps its
/// low k bits closed under the byte mix, so slots taken modulo an even
/// table size would depend on the displacement only through its low bits
/// and strand the search; the avalanche makes every slot bit respond to
/// every input bit.
fn perfect_hash(d: u32, id: ProtocolId) -> u32 {
    let mut h: u32 = if d == 0 { 0x811c_9dc5 } else { d };
    for b in id.to_be_bytes() {
        h = (h ^ b as u32).wrapping_mul(0x0100_0193);
    }
    h ^= h >> 16;
    h = h.wrapping_mul(0x85eb_ca6b);
    h ^= h >> 13;
    h = h.wrapping_mul(0xc2b2_ae35);
    h ^= h >> 16;
    h
}

impl PerfectHash {
    fn build(mapping: &IdentifierMapping) -> Result<Self, DispatchError> {
        let n = mapping.len();
        let entries = mapping.entries();

        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(id, _)) in entries.iter().enumerate() {
            buckets[(perfect_hash(0, id) as usize) % n].push(i);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&b| (std::cmp::Reverse(buckets[b].len()), b));

        let mut displace = vec![0i32; n].into_boxed_slice();
        let mut occupied = vec![false; n];
        let mut placement = vec![usize::MAX; n];

        let mut split = n;
        for (pos, &b) in order.iter().enumerate() {
            if buckets[b].len() <= 1 {
                split = pos;
                break;
            }
            let mut d = 1usize;
            'search: loop {
                if d > PERFECT_DISPLACE_LIMIT {
                    return Err(DispatchError::HashConstructionFailed { attempts: d - 1 });
                }
                let mut chosen: Vec<usize> = Vec::with_capacity(buckets[b].len());
                for &entry in &buckets[b] {
                    let slot = (perfect_hash(d as u32, entries[entry].0) as usize) % n;
                    if occupied[slot] || chosen.contains(&slot) {
                        d += 1;
                        continue 'search;
                    }
                    chosen.push(slot);
                }
                for (&entry, &slot) in buckets[b].iter().zip(&chosen) {
                    occupied[slot] = true;
                    placement[entry] = slot;
                }
                displace[b] = d as i32;
                break;
            }
        }

        // Remaining buckets hold at most one key each; hand out the free
        // slots directly and record them as negative displacements.
        let mut free = (0..n).filter(|&s| !occupied[s]);
        for &b in &order[split..] {
            if let Some(&entry) = buckets[b].first() {
                let slot = free.next().expect("one free slot per unplaced key");
                placement[entry] = slot;
                displace[b] = -(slot as i32) - 1;
            }
        }

        let mut table = vec![None; n].into_boxed_slice();
        for (entry, &slot) in placement.iter().enumerate() {
            let (id, r) = entries[entry];
            table[slot] = Some((id, r));
        }
        Ok(Self { displace, table })
    }

    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        let n = self.table.len();
        let d = self.displace[(perfect_hash(0, id) as usize) % n];
        let slot = if d < 0 {
            (-(d + 1)) as usize
        } else {
            (perfect_hash(d as u32, id) as usize) % n
        };
        match self.table[slot] {
            Some((k, r)) if k == id => Some(r),
            _ => None,
        }
    }

    fn storage_bytes(&self) -> usize {
        self.displace.len() * size_of::<i32>() + self.table.len() * size_of::<KeyedSlot>()
    }
}

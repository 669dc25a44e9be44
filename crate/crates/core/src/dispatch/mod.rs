//! Identifier-to-analyzer dispatch structures.
//!
//! Protocol transitions are resolved by looking up a 32-bit identifier
//! (EtherType, IP protocol number, link type, ...) in a per-analyzer table.
//! This module provides nine interchangeable lookup structures behind one
//! `Dispatcher` facade, plus the instrumentation used to compare them:
//! analytic storage accounting and a timed bulk-lookup driver.
//!
//! Build may be slow; lookup is the hot path. All structures are immutable
//! after construction and report identical results for identical mappings.

use std::num::NonZeroU64;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::io::LayerTrace;

mod hard_coded;
mod strategies;

use strategies::Storage;

pub use hard_coded::{compiled_mappings, fragmented_table_seed};

/// Protocol identifier within some parent-defined id space.
pub type ProtocolId = u32;

/// Opaque 8-byte reference to an analyzer instance. The engine stores a
/// dense analyzer index; benchmarks store synthetic values. Never zero, so
/// `Option<AnalyzerRef>` stays 8 bytes and a zeroed slot array means "empty".
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AnalyzerRef(NonZeroU64);

impl AnalyzerRef {
    pub fn new(raw: u64) -> Option<Self> {
        NonZeroU64::new(raw).map(Self)
    }

    /// Reference for a dense index (index 0 maps to raw value 1).
    pub fn from_index(index: usize) -> Self {
        Self(NonZeroU64::new(index as u64 + 1).expect("index + 1 is nonzero"))
    }

    pub fn index(self) -> usize {
        (self.0.get() - 1) as usize
    }

    pub const fn get(self) -> u64 {
        self.0.get()
    }
}

/// An immutable identifier-to-reference association with unique ids,
/// kept sorted by identifier.
#[derive(Clone, Debug)]
pub struct IdentifierMapping {
    entries: Vec<(ProtocolId, AnalyzerRef)>,
}

impl IdentifierMapping {
    pub fn from_entries(
        entries: impl IntoIterator<Item = (ProtocolId, AnalyzerRef)>,
    ) -> Result<Self, DispatchError> {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_unstable_by_key(|(id, _)| *id);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(DispatchError::DuplicateIdentifier { id: pair[0].0 });
            }
        }
        Ok(Self { entries })
    }

    /// Entries sorted ascending by identifier.
    pub fn entries(&self) -> &[(ProtocolId, AnalyzerRef)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_id(&self) -> Option<ProtocolId> {
        self.entries.first().map(|(id, _)| *id)
    }

    pub fn max_id(&self) -> Option<ProtocolId> {
        self.entries.last().map(|(id, _)| *id)
    }

    pub fn ids(&self) -> impl Iterator<Item = ProtocolId> + '_ {
        self.entries.iter().map(|(id, _)| *id)
    }
}

/// The available lookup structure families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DispatchStrategy {
    /// One slot per identifier in the full 16-bit id space.
    StaticArray,
    /// One slot per identifier between the smallest and largest mapped id.
    DynamicArray,
    /// Ordered tree map (`std::collections::BTreeMap`).
    TreeMap,
    /// Array nodes grouping identifiers that lie within a small gap,
    /// searched by node base.
    ArrayTree,
    /// Hash table with per-bucket collision chains, prime bucket count.
    SeparateChaining,
    /// Two-table cuckoo hash, one entry per bucket.
    CuckooHash,
    /// Multiply-shift hash chosen by retry until injective on the mapping.
    UniversalHash,
    /// Minimal perfect hash via a displacement table over an intermediate
    /// hash.
    PerfectHash,
    /// A `match` over the mapping, generated at build time and compiled in.
    /// Only available for the mappings the build script knows about.
    HardCodedSwitch,
}

impl DispatchStrategy {
    pub const ALL: [DispatchStrategy; 9] = [
        DispatchStrategy::StaticArray,
        DispatchStrategy::DynamicArray,
        DispatchStrategy::TreeMap,
        DispatchStrategy::ArrayTree,
        DispatchStrategy::SeparateChaining,
        DispatchStrategy::CuckooHash,
        DispatchStrategy::UniversalHash,
        DispatchStrategy::PerfectHash,
        DispatchStrategy::HardCodedSwitch,
    ];

    /// Short report label.
    pub fn label(self) -> &'static str {
        match self {
            DispatchStrategy::StaticArray => "StaticArray",
            DispatchStrategy::DynamicArray => "DynamicArray",
            DispatchStrategy::TreeMap => "TreeMap",
            DispatchStrategy::ArrayTree => "ArrayTree",
            DispatchStrategy::SeparateChaining => "SeparateChaining",
            DispatchStrategy::CuckooHash => "CuckooHash",
            DispatchStrategy::UniversalHash => "UniversalHash",
            DispatchStrategy::PerfectHash => "PerfectHash",
            DispatchStrategy::HardCodedSwitch => "HardCodedSwitch",
        }
    }
}

impl std::fmt::Display for DispatchStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for DispatchStrategy {
    type Err = String;

    /// Accepts the kebab-case command-line spelling, e.g. `dynamic-array`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static-array" => Ok(DispatchStrategy::StaticArray),
            "dynamic-array" => Ok(DispatchStrategy::DynamicArray),
            "tree-map" => Ok(DispatchStrategy::TreeMap),
            "array-tree" => Ok(DispatchStrategy::ArrayTree),
            "separate-chaining" => Ok(DispatchStrategy::SeparateChaining),
            "cuckoo-hash" => Ok(DispatchStrategy::CuckooHash),
            "universal-hash" => Ok(DispatchStrategy::UniversalHash),
            "perfect-hash" => Ok(DispatchStrategy::PerfectHash),
            "hard-coded-switch" => Ok(DispatchStrategy::HardCodedSwitch),
            other => Err(format!("unknown dispatch strategy `{other}`")),
        }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum DispatchError {
    #[error("mapping contains no entries")]
    EmptyMapping,
    #[error("identifier {id:#x} mapped more than once")]
    DuplicateIdentifier { id: ProtocolId },
    #[error("identifier {id:#x} outside the supported range (< {limit:#x})")]
    IdentifierOutOfRange { id: ProtocolId, limit: u64 },
    #[error("identifier span of {span} slots exceeds the dynamic array limit")]
    SpanTooLarge { span: u64 },
    #[error("no collision-free hash function found within {attempts} attempts")]
    HashConstructionFailed { attempts: usize },
    #[error("no compiled-in switch matches this mapping")]
    UnsupportedMapping,
    #[error("measurement trace contains no entries")]
    EmptyTrace,
}

/// Build statistics, filled once at construction.
#[derive(Clone, Copy, Debug)]
pub struct DispatcherStats {
    pub build_time: Duration,
    /// Analytic size of the backing storage in bytes (slot arrays, chain
    /// nodes, displacement tables). Tree maps are estimated from node
    /// geometry.
    pub storage_bytes: usize,
    pub entries: usize,
}

/// An immutable lookup structure built from an [`IdentifierMapping`].
pub struct Dispatcher {
    strategy: DispatchStrategy,
    storage: Storage,
    stats: DispatcherStats,
}

impl std::fmt::Debug for Dispatcher {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dispatcher")
            .field("strategy", &self.strategy)
            .field("entries", &self.stats.entries)
            .field("storage_bytes", &self.stats.storage_bytes)
            .finish()
    }
}

impl Dispatcher {
    /// Builds the chosen structure. `seed` fixes every randomized choice
    /// (hash multipliers), so identical inputs produce identical layouts.
    pub fn build(
        mapping: &IdentifierMapping,
        strategy: DispatchStrategy,
        seed: u64,
    ) -> Result<Self, DispatchError> {
        if mapping.is_empty() {
            return Err(DispatchError::EmptyMapping);
        }
        let start = Instant::now();
        let storage = Storage::build(mapping, strategy, seed)?;
        let build_time = start.elapsed();
        let stats = DispatcherStats {
            build_time,
            storage_bytes: storage.storage_bytes(),
            entries: mapping.len(),
        };
        Ok(Self {
            strategy,
            storage,
            stats,
        })
    }

    #[inline]
    pub fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        self.storage.lookup(id)
    }

    pub fn strategy(&self) -> DispatchStrategy {
        self.strategy
    }

    pub fn stats(&self) -> &DispatcherStats {
        &self.stats
    }

    /// Hash of the concrete structure layout: slot placement, table sizes,
    /// hash parameters. Equal layouts hash equal; used to check build
    /// determinism.
    pub fn layout_digest(&self) -> u64 {
        self.storage.layout_digest()
    }
}

/// Result of a timed bulk-lookup pass over a layer trace.
#[derive(Clone, Copy, Debug)]
pub struct DispatchTiming {
    pub total: Duration,
    pub lookups: u64,
    pub hits: u64,
    pub misses: u64,
    /// XOR fold of every lookup's raw result. Consumed so the optimizer
    /// cannot drop the lookups; doubles as an equivalence check between
    /// strategies.
    pub checksum: u64,
}

impl DispatchTiming {
    pub fn mean_ns(&self) -> f64 {
        self.total.as_nanos() as f64 / self.lookups as f64
    }
}

/// Runs every identifier of `trace` through `dispatcher` and times the
/// whole pass. The loop body is monomorphized per structure so each
/// strategy pays only its own lookup cost.
pub fn measure_dispatch(
    dispatcher: &Dispatcher,
    trace: &LayerTrace,
) -> Result<DispatchTiming, DispatchError> {
    let ids = trace.ids();
    if ids.is_empty() {
        return Err(DispatchError::EmptyTrace);
    }
    let mut hits = 0u64;
    let mut checksum = 0u64;

    // Each iteration folds the lookup result into the operand of the next
    // lookup. The engine can never issue a dispatch before the previous
    // analyzer has parsed its layer, so dispatch cost in a packet walk is
    // serial latency; without the chain, out-of-order execution overlaps
    // adjacent lookups and measures standalone throughput instead.
    //
    // `Option<AnalyzerRef>` occupies the niche of its `NonZeroU64`, so
    // `map_or(0, get)` is the raw slot value and carries the dependency on
    // both hit and miss. Reference values are slot indices plus one, far
    // below 2^32; the folded high half is always zero at run time and the
    // perturbation never changes which id is looked up.
    macro_rules! timed_pass {
        ($table:expr) => {{
            let table = $table;
            let start = Instant::now();
            for &id in ids {
                let id = id ^ ((checksum >> 32) as u32);
                let raw = table.lookup(id).map_or(0, |r| r.get());
                hits += (raw != 0) as u64;
                checksum ^= raw;
            }
            start.elapsed()
        }};
    }

    let total = match &dispatcher.storage {
        Storage::Static(t) => timed_pass!(t),
        Storage::Dynamic(t) => timed_pass!(t),
        Storage::Tree(t) => timed_pass!(t),
        Storage::ArrayTree(t) => timed_pass!(t),
        Storage::Chain(t) => timed_pass!(t),
        Storage::Cuckoo(t) => timed_pass!(t),
        Storage::Universal(t) => timed_pass!(t),
        Storage::Perfect(t) => timed_pass!(t),
        Storage::HardCoded(t) => timed_pass!(t),
    };
    let checksum = std::hint::black_box(checksum);

    let lookups = ids.len() as u64;
    Ok(DispatchTiming {
        total,
        lookups,
        hits,
        misses: lookups - hits,
        checksum,
    })
}

//! Compiled-in `match` dispatch.
//!
//! The build script turns the benchmark mappings into plain `match`
//! statements, which the compiler lowers into whatever branch structure it
//! sees fit. This is the baseline the data structures are measured against:
//! dispatch logic fixed at compile time, extended only by rebuilding.

use super::strategies::Slot;
use super::{AnalyzerRef, DispatchError, IdentifierMapping, ProtocolId};

mod tables {
    include!(concat!(env!("OUT_DIR"), "/hard_coded_tables.rs"));
}

/// Seed the compiled fragmented table was generated for.
pub fn fragmented_table_seed() -> u64 {
    tables::FRAGMENTED_SEED
}

/// Identifier sets with a compiled-in switch, in table order.
pub fn compiled_mappings() -> [&'static [u32]; 2] {
    [tables::concise::IDS, tables::fragmented::IDS]
}

pub(super) struct HardCodedSwitch {
    lookup_fn: fn(ProtocolId) -> u16,
    table_index: usize,
    refs: Box<[Slot]>,
}

/// Binds the mapping to a compiled table. The switch returns a slot index
/// (position in the sorted id list); the references live in a side table so
/// arbitrary `AnalyzerRef` values work with the fixed code.
pub(super) fn build(mapping: &IdentifierMapping) -> Result<HardCodedSwitch, DispatchError> {
    let candidates: [(fn(ProtocolId) -> u16, &[u32]); 2] = [
        (tables::concise::lookup, tables::concise::IDS),
        (tables::fragmented::lookup, tables::fragmented::IDS),
    ];
    for (table_index, (lookup_fn, ids)) in candidates.into_iter().enumerate() {
        if mapping.len() == ids.len() && mapping.ids().zip(ids).all(|(a, &b)| a == b) {
            // Mapping entries are sorted, so entry order equals slot order.
            let refs: Box<[Slot]> = mapping.entries().iter().map(|&(_, r)| Some(r)).collect();
            return Ok(HardCodedSwitch {
                lookup_fn,
                table_index,
                refs,
            });
        }
    }
    Err(DispatchError::UnsupportedMapping)
}

impl HardCodedSwitch {
    #[inline]
    pub(super) fn lookup(&self, id: ProtocolId) -> Option<AnalyzerRef> {
        let slot = (self.lookup_fn)(id);
        if slot == u16::MAX {
            None
        } else {
            self.refs[slot as usize]
        }
    }

    pub(super) fn storage_bytes(&self) -> usize {
        self.refs.len() * std::mem::size_of::<Slot>()
    }

    pub(super) fn table_index(&self) -> usize {
        self.table_index
    }

    pub(super) fn refs(&self) -> &[Slot] {
        &self.refs
    }
}

//! Generates the hard-coded switch lookup tables compiled into the binary.
//!
//! The dispatch benchmark compares data structures against dispatch logic
//! that is fixed at compile time. This script emits one `match`-based lookup
//! function per supported mapping: the concise mapping and the fragmented
//! mapping for the default seed. Each function maps an identifier to its
//! slot in the sorted id list, `u16::MAX` meaning "not mapped".

use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

include!("src/scenario_ids.rs");

fn emit_table(out: &mut String, name: &str, ids: &[u32]) {
    writeln!(out, "pub mod {name} {{").unwrap();
    write!(out, "    pub static IDS: &[u32] = &[").unwrap();
    for id in ids {
        write!(out, "{id}, ").unwrap();
    }
    writeln!(out, "];").unwrap();
    writeln!(out, "    #[inline]").unwrap();
    writeln!(out, "    pub fn lookup(id: u32) -> u16 {{").unwrap();
    writeln!(out, "        match id {{").unwrap();
    for (slot, id) in ids.iter().enumerate() {
        writeln!(out, "            {id} => {slot},").unwrap();
    }
    writeln!(out, "            _ => u16::MAX,").unwrap();
    writeln!(out, "        }}").unwrap();
    writeln!(out, "    }}").unwrap();
    writeln!(out, "}}").unwrap();
}

fn main() {
    println!("cargo:rerun-if-changed=src/scenario_ids.rs");

    let mut fragmented: Vec<u32> = CONCISE_BENCH_IDS.to_vec();
    fragmented.extend(sample_fragmented_extra_ids(DEFAULT_SEED));
    fragmented.sort_unstable();

    let mut out = String::new();
    writeln!(
        out,
        "// Generated by the build script from src/scenario_ids.rs. Do not edit."
    )
    .unwrap();
    writeln!(out, "pub const FRAGMENTED_SEED: u64 = {DEFAULT_SEED};").unwrap();
    emit_table(&mut out, "concise", CONCISE_BENCH_IDS);
    emit_table(&mut out, "fragmented", &fragmented);

    let dest = Path::new(&env::var("OUT_DIR").unwrap()).join("hard_coded_tables.rs");
    fs::write(dest, out).unwrap();
}

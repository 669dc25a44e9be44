//! Input sources: capture files, layer traces and benchmark scenarios.

mod pcap;
mod scenario;
mod trace;

pub use pcap::{CaptureRecord, PcapError, PcapReader, MAGIC_MICROS, MAGIC_NANOS};
pub use scenario::{
    generate_scenario, scenario_mapping, BenchScenario, MappingKind, RealisticPacket,
    TrafficKind, realistic_plan,
};
pub use trace::{read_layer_trace, write_layer_trace, LayerTrace, TraceError};

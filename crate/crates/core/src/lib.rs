//! ptgflow: a packet-level protocol analysis engine.
//!
//! Packets walk a graph of protocol analyzers. Each analyzer parses its
//! header and forwards the payload under an identifier that its own
//! transition table resolves to the next analyzer, so the same numeric id
//! can mean different things under different parents. Transition tables are
//! pluggable lookup structures (`dispatch`), the walk and analyzer registry
//! live in `engine`, and the included analyzers cover the common link,
//! network and transport layers plus two industrial control protocols.

pub mod analyzers;
pub mod bench;
pub mod dispatch;
pub mod engine;
pub mod ics;
pub mod io;
pub mod policy;
pub mod scenario_ids;
pub mod stack;
pub mod synth;
pub mod telemetry;
pub mod testkit;

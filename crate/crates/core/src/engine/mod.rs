//! Analyzer interface, registry, and the per-packet layer walk.
//!
//! Packet parsing executes a protocol transition graph: every analyzer owns
//! a transition table (a [`Dispatcher`]) mapping the protocol identifiers it
//! extracts to child analyzers, and a root table keyed by the capture
//! link-layer type selects the first analyzer. The walk is strictly
//! byte-consuming, so it terminates on any input and any configuration,
//! including graphs with cycles (VLAN QinQ, GRE back into Ethernet).

pub mod config;
pub mod event;
pub mod hardwired;

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use thiserror::Error;

use crate::dispatch::{
    AnalyzerRef, DispatchError, DispatchStrategy, Dispatcher, IdentifierMapping, ProtocolId,
};
use crate::telemetry::{ThrottleConfig, ThrottleState, UnknownProtocolRecord};
pub use event::{Event, Value};

/// Dense handle for a registered analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnalyzerTag(u32);

impl AnalyzerTag {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Byte range into a packet's raw data. Analyzers only ever see and return
/// spans, never raw slices with independent lifetimes, which keeps layer
/// bookkeeping in terms of absolute offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(self) -> bool {
        self.start == self.end
    }

    /// Sub-span beginning `offset` bytes in.
    pub fn from_offset(self, offset: usize) -> Span {
        Span {
            start: self.start + offset,
            end: self.end,
        }
    }
}

/// What one analysis step did with its span.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyzeOutcome {
    /// Header parsed; hand `payload` to whatever `next_id` maps to in this
    /// analyzer's transition table.
    Forward { next_id: ProtocolId, payload: Span },
    /// Fully consumed; the walk stops here.
    Terminal,
    /// Structurally invalid input; the walk stops, prior layers stay.
    Malformed { reason: String },
}

impl AnalyzeOutcome {
    pub fn malformed(reason: impl Into<String>) -> Self {
        AnalyzeOutcome::Malformed {
            reason: reason.into(),
        }
    }
}

/// One parsed layer: which analyzer claimed which header bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerRecord {
    pub tag: AnalyzerTag,
    pub start: usize,
    pub end: usize,
}

/// Per-packet working state. All mutable parsing state lives here; analyzer
/// instances themselves are stateless singletons.
#[derive(Debug)]
pub struct PacketContext {
    pub capture_time: f64,
    pub link_type: ProtocolId,
    pub raw: Vec<u8>,
    pub layers: Vec<LayerRecord>,
    pub events: Vec<Event>,
    pub failures: Vec<UnknownProtocolRecord>,
    /// Link-layer addresses, filled by the Ethernet analyzer for consumers
    /// further up the stack (the ICS events carry them).
    pub eth_src: Option<[u8; 6]>,
    pub eth_dst: Option<[u8; 6]>,
}

impl PacketContext {
    pub fn new(capture_time: f64, link_type: ProtocolId, raw: Vec<u8>) -> Self {
        Self {
            capture_time,
            link_type,
            raw,
            layers: Vec::new(),
            events: Vec::new(),
            failures: Vec::new(),
            eth_src: None,
            eth_dst: None,
        }
    }

    pub fn bytes(&self, span: Span) -> &[u8] {
        &self.raw[span.start..span.end]
    }

    pub fn emit(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn whole(&self) -> Span {
        Span {
            start: 0,
            end: self.raw.len(),
        }
    }
}

/// The dissector contract. One instance per analyzer per registry; `analyze`
/// must keep all per-packet state in the context and consume at least one
/// byte before forwarding.
pub trait Analyzer: Send + Sync {
    fn name(&self) -> &str;
    fn analyze(&self, ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome;
}

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("analyzer name already registered: {name}")]
    DuplicateName { name: String },
    #[error("unknown analyzer: {name}")]
    UnknownAnalyzer { name: String },
    #[error("transition table construction failed: {0}")]
    Dispatch(#[from] DispatchError),
}

/// Collects analyzers and transitions, then freezes into a [`Registry`].
#[derive(Default)]
pub struct RegistryBuilder {
    analyzers: Vec<Box<dyn Analyzer>>,
    by_name: HashMap<String, u32>,
    // (parent, identifier, child); None parent = ROOT. Kept in insertion
    // order so later registrations replace earlier ones for the same
    // (parent, identifier).
    edges: Vec<(Option<AnalyzerTag>, ProtocolId, AnalyzerTag)>,
    throttle: ThrottleConfig,
}

impl RegistryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_throttle(mut self, cfg: ThrottleConfig) -> Self {
        self.throttle = cfg;
        self
    }

    pub fn register_analyzer(
        &mut self,
        analyzer: Box<dyn Analyzer>,
    ) -> Result<AnalyzerTag, EngineError> {
        let name = analyzer.name().to_owned();
        if self.by_name.contains_key(&name) {
            return Err(EngineError::DuplicateName { name });
        }
        let tag = AnalyzerTag(self.analyzers.len() as u32);
        self.by_name.insert(name, tag.0);
        self.analyzers.push(analyzer);
        Ok(tag)
    }

    pub fn tag(&self, name: &str) -> Option<AnalyzerTag> {
        self.by_name.get(name).map(|&i| AnalyzerTag(i))
    }

    /// `parent = None` registers under the root table (keyed by capture
    /// link-layer type).
    pub fn register_transition(
        &mut self,
        parent: Option<AnalyzerTag>,
        id: ProtocolId,
        child: AnalyzerTag,
    ) -> Result<(), EngineError> {
        for tag in parent.iter().chain(std::iter::once(&child)) {
            if tag.index() >= self.analyzers.len() {
                return Err(EngineError::UnknownAnalyzer {
                    name: format!("tag#{}", tag.0),
                });
            }
        }
        self.edges.push((parent, id, child));
        Ok(())
    }

    pub fn freeze(self, strategy: DispatchStrategy, seed: u64) -> Result<Registry, EngineError> {
        // Last writer wins per (parent, id).
        let mut root: BTreeMap<ProtocolId, AnalyzerRef> = BTreeMap::new();
        let mut per_analyzer: Vec<BTreeMap<ProtocolId, AnalyzerRef>> =
            (0..self.analyzers.len()).map(|_| BTreeMap::new()).collect();
        for (parent, id, child) in &self.edges {
            let target = AnalyzerRef::from_index(child.index());
            match parent {
                None => {
                    root.insert(*id, target);
                }
                Some(p) => {
                    per_analyzer[p.index()].insert(*id, target);
                }
            }
        }
        let build = |map: BTreeMap<ProtocolId, AnalyzerRef>| -> Result<Option<Dispatcher>, EngineError> {
            if map.is_empty() {
                return Ok(None);
            }
            let mapping = IdentifierMapping::from_entries(map)?;
            Ok(Some(Dispatcher::build(&mapping, strategy, seed)?))
        };
        let mut tables = Vec::with_capacity(per_analyzer.len());
        for map in per_analyzer {
            tables.push(build(map)?);
        }
        Ok(Registry {
            analyzers: self.analyzers,
            by_name: self.by_name,
            root: build(root)?,
            tables,
            throttle_cfg: self.throttle,
            throttle: Mutex::new(ThrottleState::new()),
        })
    }
}

/// Frozen analyzer registry: singleton analyzer instances, their transition
/// tables, and the root table. Immutable after construction apart from the
/// unknown-protocol throttle state, which sits behind a mutex.
pub struct Registry {
    analyzers: Vec<Box<dyn Analyzer>>,
    by_name: HashMap<String, u32>,
    root: Option<Dispatcher>,
    tables: Vec<Option<Dispatcher>>,
    throttle_cfg: ThrottleConfig,
    throttle: Mutex<ThrottleState>,
}

impl Registry {
    pub fn tag(&self, name: &str) -> Option<AnalyzerTag> {
        self.by_name.get(name).map(|&i| AnalyzerTag(i))
    }

    pub fn analyzer(&self, tag: AnalyzerTag) -> &dyn Analyzer {
        self.analyzers[tag.index()].as_ref()
    }

    pub fn analyzer_count(&self) -> usize {
        self.analyzers.len()
    }

    pub fn name_of(&self, tag: AnalyzerTag) -> &str {
        self.analyzers[tag.index()].name()
    }

    pub fn throttle_config(&self) -> &ThrottleConfig {
        &self.throttle_cfg
    }

    /// Resolve one transition. `from = None` consults the root table.
    pub fn route(&self, from: Option<AnalyzerTag>, id: ProtocolId) -> Option<AnalyzerRef> {
        let table = match from {
            None => self.root.as_ref(),
            Some(tag) => self.tables.get(tag.index()).and_then(|t| t.as_ref()),
        };
        table.and_then(|d| d.lookup(id))
    }

    /// Run the transition-graph walk over one packet.
    pub fn process_packet(&self, ctx: &mut PacketContext) {
        walk_packet(self, |from, id| self.route(from, id), ctx);
    }
}

/// The walk itself, generic over the routing function so the modular and
/// hard-coded pipelines share every instruction except the dispatch.
pub(crate) fn walk_packet<R>(reg: &Registry, route: R, ctx: &mut PacketContext)
where
    R: Fn(Option<AnalyzerTag>, ProtocolId) -> Option<AnalyzerRef>,
{
    if ctx.raw.is_empty() {
        return;
    }
    let mut span = ctx.whole();
    let mut from: Option<AnalyzerTag> = None;
    let mut id = ctx.link_type;
    loop {
        let Some(next) = route(from, id) else {
            record_unknown(reg, ctx, from, id, span);
            return;
        };
        let tag = AnalyzerTag(next.index() as u32);
        match reg.analyzers[tag.index()].analyze(ctx, span) {
            AnalyzeOutcome::Terminal => {
                ctx.layers.push(LayerRecord {
                    tag,
                    start: span.start,
                    end: span.end,
                });
                return;
            }
            AnalyzeOutcome::Malformed { reason } => {
                let name = reg.name_of(tag).to_owned();
                ctx.emit(
                    Event::new("malformed_layer")
                        .field("analyzer", Value::Str(name))
                        .field("reason", Value::Str(reason)),
                );
                return;
            }
            AnalyzeOutcome::Forward { next_id, payload } => {
                // Zero consumption would loop forever on cyclic graphs;
                // treat it as an analyzer bug, not an engine fault.
                let consumed = payload.start > span.start
                    && payload.start <= payload.end
                    && payload.end <= span.end;
                if !consumed {
                    let name = reg.name_of(tag).to_owned();
                    ctx.emit(
                        Event::new("malformed_layer")
                            .field("analyzer", Value::Str(name))
                            .field("reason", Value::Str("forwarded without consuming".into())),
                    );
                    return;
                }
                ctx.layers.push(LayerRecord {
                    tag,
                    start: span.start,
                    end: payload.start,
                });
                from = Some(tag);
                id = next_id;
                span = payload;
            }
        }
    }
}

fn record_unknown(
    reg: &Registry,
    ctx: &mut PacketContext,
    from: Option<AnalyzerTag>,
    id: ProtocolId,
    span: Span,
) {
    let snap_len = reg.throttle_cfg.snap_bytes.min(span.len());
    let snap = ctx.bytes(span)[..snap_len].to_vec();
    let analyzer = match from {
        None => "ROOT".to_owned(),
        Some(tag) => reg.name_of(tag).to_owned(),
    };
    // Throttle keys are (dispatching analyzer, identifier); 0 is ROOT.
    let key_analyzer = from.map_or(0, |t| t.0 + 1);
    let logged = reg
        .throttle
        .lock()
        .expect("throttle lock")
        .report(key_analyzer, id, ctx.capture_time, &reg.throttle_cfg);
    ctx.failures.push(UnknownProtocolRecord {
        time: ctx.capture_time,
        analyzer,
        identifier: id,
        snap,
        logged,
    });
}

#[cfg(test)]
mod tests;

use super::*;
use crate::dispatch::DispatchStrategy;
use crate::testkit::{shim_chain, shim_header, ShimAnalyzer};

fn shim_registry(names: &[&str]) -> (Registry, Vec<AnalyzerTag>) {
    let mut builder = RegistryBuilder::new();
    let tags: Vec<AnalyzerTag> = names
        .iter()
        .map(|n| builder.register_analyzer(Box::new(ShimAnalyzer::new(*n))).unwrap())
        .collect();
    (builder.freeze(DispatchStrategy::DynamicArray, 7).unwrap(), tags)
}

#[test]
fn tags_are_dense_in_registration_order() {
    let mut builder = RegistryBuilder::new();
    let eth = builder
        .register_analyzer(Box::new(ShimAnalyzer::new("ETHERNET")))
        .unwrap();
    let vlan = builder
        .register_analyzer(Box::new(ShimAnalyzer::new("VLAN")))
        .unwrap();
    assert_eq!(eth, AnalyzerTag(0));
    assert_eq!(vlan, AnalyzerTag(1));

    let reg = builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap();
    assert_eq!(reg.name_of(eth), "ETHERNET");
    assert_eq!(reg.name_of(vlan), "VLAN");
    assert_eq!(reg.tag("VLAN"), Some(vlan));
}

#[test]
fn duplicate_name_is_rejected() {
    let mut builder = RegistryBuilder::new();
    builder
        .register_analyzer(Box::new(ShimAnalyzer::new("ETHERNET")))
        .unwrap();
    let err = builder
        .register_analyzer(Box::new(ShimAnalyzer::new("ETHERNET")))
        .unwrap_err();
    assert!(matches!(err, EngineError::DuplicateName { name } if name == "ETHERNET"));
}

#[test]
fn later_transition_registration_wins() {
    let mut builder = RegistryBuilder::new();
    let a = builder.register_analyzer(Box::new(ShimAnalyzer::new("A"))).unwrap();
    let b = builder.register_analyzer(Box::new(ShimAnalyzer::new("B"))).unwrap();
    let c = builder.register_analyzer(Box::new(ShimAnalyzer::new("C"))).unwrap();
    builder.register_transition(Some(a), 5, b).unwrap();
    builder.register_transition(Some(a), 5, c).unwrap();
    let reg = builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap();

    let hit = reg.route(Some(a), 5).expect("transition present");
    assert_eq!(reg.analyzer(AnalyzerTag(hit.index() as u32)).name(), "C");
}

#[test]
fn routing_walks_transitions_and_records_layers() {
    let (mut builder, root, middle, leaf);
    builder = RegistryBuilder::new();
    root = builder.register_analyzer(Box::new(ShimAnalyzer::new("ROOT_SHIM"))).unwrap();
    middle = builder.register_analyzer(Box::new(ShimAnalyzer::new("MIDDLE"))).unwrap();
    leaf = builder.register_analyzer(Box::new(ShimAnalyzer::new("LEAF"))).unwrap();
    builder.register_transition(None, 1, root).unwrap();
    builder.register_transition(Some(root), 10, middle).unwrap();
    builder.register_transition(Some(middle), 20, leaf).unwrap();
    let reg = builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap();

    let raw = shim_chain(&[10, 20]);
    let mut ctx = PacketContext::new(0.0, 1, raw.clone());
    reg.process_packet(&mut ctx);

    let names: Vec<&str> = ctx.layers.iter().map(|l| reg.name_of(l.tag)).collect();
    assert_eq!(names, ["ROOT_SHIM", "MIDDLE", "LEAF"]);
    assert_eq!(ctx.layers[0].start, 0);
    assert_eq!(ctx.layers[1].start, 4);
    assert_eq!(ctx.layers[2].start, 8);
    // terminal layer covers the rest of the packet
    assert_eq!(ctx.layers[2].end, raw.len());
    assert!(ctx.failures.is_empty());
}

#[test]
fn forward_must_consume_bytes() {
    struct Lazy;
    impl Analyzer for Lazy {
        fn name(&self) -> &str {
            "LAZY"
        }
        fn analyze(&self, _ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
            AnalyzeOutcome::Forward { next_id: 1, payload: span }
        }
    }

    let mut builder = RegistryBuilder::new();
    let lazy = builder.register_analyzer(Box::new(Lazy)).unwrap();
    builder.register_transition(None, 1, lazy).unwrap();
    builder.register_transition(Some(lazy), 1, lazy).unwrap();
    let reg = builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap();

    let raw = vec![0u8; 8];
    let mut ctx = PacketContext::new(0.0, 1, raw);
    reg.process_packet(&mut ctx);

    // the walk stops with an event; the offending layer is not recorded
    assert!(ctx.layers.is_empty());
    let ev = ctx
        .events
        .iter()
        .find(|e| e.name == "malformed_layer")
        .expect("guard event");
    assert!(ev
        .get("reason")
        .and_then(|v| v.as_str())
        .unwrap()
        .contains("forwarded without consuming"));
}

#[test]
fn payload_escaping_parent_span_is_malformed() {
    struct Overreach;
    impl Analyzer for Overreach {
        fn name(&self) -> &str {
            "OVERREACH"
        }
        fn analyze(&self, _ctx: &mut PacketContext, span: Span) -> AnalyzeOutcome {
            AnalyzeOutcome::Forward {
                next_id: 1,
                payload: Span { start: span.start + 1, end: span.end + 4 },
            }
        }
    }

    let mut builder = RegistryBuilder::new();
    let bad = builder.register_analyzer(Box::new(Overreach)).unwrap();
    builder.register_transition(None, 1, bad).unwrap();
    builder.register_transition(Some(bad), 1, bad).unwrap();
    let reg = builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap();

    let raw = vec![0u8; 8];
    let mut ctx = PacketContext::new(0.0, 1, raw);
    reg.process_packet(&mut ctx);
    assert!(ctx.events.iter().any(|e| e.name == "malformed_layer"));
}

#[test]
fn unknown_identifier_becomes_failure_record() {
    let (reg, tags) = {
        let mut builder = RegistryBuilder::new();
        let a = builder.register_analyzer(Box::new(ShimAnalyzer::new("A"))).unwrap();
        builder.register_transition(None, 1, a).unwrap();
        (builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap(), vec![a])
    };
    let _ = tags;

    let mut raw = Vec::new();
    raw.extend_from_slice(&shim_header(false, 0xBEE));
    raw.extend_from_slice(&[0xAA; 12]);
    let mut ctx = PacketContext::new(3.5, 1, raw);
    reg.process_packet(&mut ctx);

    assert_eq!(ctx.failures.len(), 1);
    let rec = &ctx.failures[0];
    assert_eq!(rec.identifier, 0xBEE);
    assert_eq!(rec.analyzer, "A");
    // snapshot honours the configured cap (default 10 bytes)
    assert_eq!(rec.snap.len(), 10);
    assert_eq!(rec.time, 3.5);
}

#[test]
fn unknown_root_identifier_names_root() {
    let (reg, _) = shim_registry(&["A"]);
    let raw = shim_chain(&[1]);
    let mut ctx = PacketContext::new(0.0, 777, raw);
    reg.process_packet(&mut ctx);
    assert_eq!(ctx.failures.len(), 1);
    assert_eq!(ctx.failures[0].analyzer, "ROOT");
    assert_eq!(ctx.failures[0].identifier, 777);
}

#[test]
fn route_rejects_foreign_tag() {
    let (reg, _) = shim_registry(&["A", "B"]);
    // tag index past the registered range routes nowhere
    assert!(reg.route(Some(AnalyzerTag(99)), 1).is_none());
}

#[test]
fn malformed_outcome_records_event_and_stops() {
    let (reg, tags) = {
        let mut builder = RegistryBuilder::new();
        let a = builder.register_analyzer(Box::new(ShimAnalyzer::new("A"))).unwrap();
        builder.register_transition(None, 1, a).unwrap();
        (builder.freeze(DispatchStrategy::DynamicArray, 1).unwrap(), a)
    };
    let _ = tags;

    // two bytes: too short for the shim header
    let raw = vec![0u8, 0u8];
    let mut ctx = PacketContext::new(0.0, 1, raw);
    reg.process_packet(&mut ctx);

    assert!(ctx.layers.is_empty());
    let ev = ctx.events.iter().find(|e| e.name == "malformed_layer").unwrap();
    assert_eq!(ev.get("analyzer").and_then(|v| v.as_str()), Some("A"));
    assert_eq!(
        ev.get("reason").and_then(|v| v.as_str()),
        Some("shim header truncated")
    );
}

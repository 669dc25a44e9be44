//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them on success).
//! Tolerances and runtime budgets are asserted, not just reported.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptgflow_core::bench::alloc::CountingAllocator;
use ptgflow_core::bench::stats::non_overlapping;
use ptgflow_core::bench::{bench_dispatch_cell, bench_pipeline, DispatchCellResult};
use ptgflow_core::dispatch::{
    AnalyzerRef, DispatchError, DispatchStrategy, Dispatcher, IdentifierMapping,
};
use ptgflow_core::engine::config::{Config, Options, KNOWN_ANALYZERS};
use ptgflow_core::engine::{AnalyzeOutcome, PacketContext, RegistryBuilder};
use ptgflow_core::io::{scenario_mapping, BenchScenario, MappingKind, PcapReader, TrafficKind};
use ptgflow_core::stack::{build_analyzer, build_registry, run_capture, Routing, RunSinks, RunSummary};
use ptgflow_core::synth::{self, GooseSpec};
use ptgflow_core::testkit::{shim_chain, ShimAnalyzer};

// The pipeline benchmark reports allocation deltas when the counting
// allocator is installed in the running binary.
#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} {status}: {detail}");
    assert!(pass, "criterion {criterion:02} {status}: {detail}");
}

const SRC: synth::Mac = [0x02, 0, 0, 0, 0, 0x01];
const DST: synth::Mac = [0x02, 0, 0, 0, 0, 0x02];

// ---------------------------------------------------------------- 1

fn random_mapping(rng: &mut ChaCha8Rng) -> IdentifierMapping {
    let size = rng.random_range(1..=64usize);
    let mut ids = std::collections::BTreeSet::new();
    if rng.random_bool(0.5) {
        // Clustered: a few dense runs, the shape of real ethertype tables.
        while ids.len() < size {
            let base = rng.random_range(0..65000u32);
            let run = rng.random_range(1..=8usize);
            for i in 0..run {
                if ids.len() == size {
                    break;
                }
                ids.insert(base + i as u32);
            }
        }
    } else {
        while ids.len() < size {
            ids.insert(rng.random_range(0..65536u32));
        }
    }
    let entries = ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, AnalyzerRef::from_index(i)));
    IdentifierMapping::from_entries(entries).unwrap()
}

#[test]
fn criterion_01_every_strategy_matches_the_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let strategies: Vec<_> = DispatchStrategy::ALL
        .into_iter()
        .filter(|s| *s != DispatchStrategy::HardCodedSwitch)
        .collect();

    let mut probes_checked = 0u64;
    for round in 0..10_000u64 {
        let mapping = random_mapping(&mut rng);
        let oracle: BTreeMap<u32, AnalyzerRef> = mapping.entries().iter().copied().collect();

        let mut probes: Vec<u32> = Vec::new();
        for &(id, _) in mapping.entries() {
            probes.push(id);
            probes.push(id.wrapping_sub(1));
            probes.push(id + 1);
        }
        for _ in 0..8 {
            probes.push(rng.random_range(0..65536u32));
        }
        probes.extend([0, 65535, 0x10000, 1 << 24, u32::MAX]);

        for &strategy in &strategies {
            let dispatcher = match Dispatcher::build(&mapping, strategy, round) {
                Ok(d) => d,
                Err(e) => {
                    verdict(1, false, &format!("{strategy} failed to build on round {round}: {e}"));
                    return;
                }
            };
            for &p in &probes {
                if dispatcher.lookup(p) != oracle.get(&p).copied() {
                    verdict(
                        1,
                        false,
                        &format!("{strategy} disagrees with the oracle at id {p:#x} (round {round})"),
                    );
                    return;
                }
            }
            probes_checked += probes.len() as u64;
        }
    }

    // The compiled switch knows only its baked-in tables and must say so.
    let arbitrary = random_mapping(&mut rng);
    let refused = matches!(
        Dispatcher::build(&arbitrary, DispatchStrategy::HardCodedSwitch, 0),
        Err(DispatchError::UnsupportedMapping)
    );

    let secs = started.elapsed().as_secs_f64();
    let pass = refused && secs < 60.0;
    verdict(
        1,
        pass,
        &format!(
            "8 strategies x 10^4 mappings, {probes_checked} probes all match the ordered-map oracle in {secs:.1}s (< 60s)"
        ),
    );
}

// ---------------------------------------------------------------- 2-5

fn cell(
    strategy: DispatchStrategy,
    mapping: MappingKind,
    traffic: TrafficKind,
    reps: usize,
) -> DispatchCellResult {
    bench_dispatch_cell(
        strategy,
        &BenchScenario {
            mapping,
            traffic,
            pdu_count: 1_000_000,
            seed: 42,
        },
        reps,
    )
}

#[test]
fn criterion_02_concise_realistic_ordering() {
    let started = Instant::now();
    let dynamic = cell(
        DispatchStrategy::DynamicArray,
        MappingKind::Concise,
        TrafficKind::Realistic,
        10,
    );
    let tree = cell(
        DispatchStrategy::TreeMap,
        MappingKind::Concise,
        TrafficKind::Realistic,
        10,
    );
    let chaining = cell(
        DispatchStrategy::SeparateChaining,
        MappingKind::Concise,
        TrafficKind::Realistic,
        10,
    );
    let hard = cell(
        DispatchStrategy::HardCodedSwitch,
        MappingKind::Concise,
        TrafficKind::Realistic,
        10,
    );
    let secs = started.elapsed().as_secs_f64();

    let ordered = dynamic.mean_lookup_ns <= tree.mean_lookup_ns
        && tree.mean_lookup_ns <= chaining.mean_lookup_ns;
    let near_hard = dynamic.mean_lookup_ns <= 1.25 * hard.mean_lookup_ns;
    let cis_split = non_overlapping(dynamic.lookup_ci.unwrap(), chaining.lookup_ci.unwrap());
    let pass = ordered && near_hard && cis_split && secs < 300.0;
    verdict(
        2,
        pass,
        &format!(
            "1M PDUs x 10 reps: dynamic-array {:.2}ns <= tree-map {:.2}ns <= chaining {:.2}ns, \
             dynamic within 1.25x of hard-coded {:.2}ns, CIs disjoint={cis_split}, {secs:.1}s (< 300s)",
            dynamic.mean_lookup_ns, tree.mean_lookup_ns, chaining.mean_lookup_ns, hard.mean_lookup_ns
        ),
    );
}

#[test]
fn criterion_03_fragmented_randomized_degradation() {
    let tree_easy = cell(
        DispatchStrategy::TreeMap,
        MappingKind::Concise,
        TrafficKind::Realistic,
        10,
    );
    let tree_hard = cell(
        DispatchStrategy::TreeMap,
        MappingKind::Fragmented,
        TrafficKind::Randomized,
        10,
    );
    let universal = cell(
        DispatchStrategy::UniversalHash,
        MappingKind::Fragmented,
        TrafficKind::Randomized,
        10,
    );
    let dynamic = cell(
        DispatchStrategy::DynamicArray,
        MappingKind::Fragmented,
        TrafficKind::Randomized,
        10,
    );

    let degradation = tree_hard.mean_lookup_ns / tree_easy.mean_lookup_ns;
    let universal_ratio = universal.mean_lookup_ns / dynamic.mean_lookup_ns;
    let pass = degradation >= 1.5 && universal_ratio <= 1.5;
    verdict(
        3,
        pass,
        &format!(
            "tree-map degrades {degradation:.2}x (>= 1.5x) from {:.2}ns to {:.2}ns; \
             universal-hash {:.2}ns stays within {universal_ratio:.2}x (<= 1.5x) of dynamic-array {:.2}ns",
            tree_easy.mean_lookup_ns, tree_hard.mean_lookup_ns,
            universal.mean_lookup_ns, dynamic.mean_lookup_ns
        ),
    );
}

#[test]
fn criterion_04_universal_hash_build_cost() {
    let mapping = scenario_mapping(MappingKind::Fragmented, 42);
    let mean_build = |strategy: DispatchStrategy| -> f64 {
        Dispatcher::build(&mapping, strategy, 0).unwrap(); // warmup
        let mut total = 0.0;
        for rep in 0..10u64 {
            let d = Dispatcher::build(&mapping, strategy, rep).unwrap();
            total += d.stats().build_time.as_secs_f64();
        }
        total / 10.0
    };
    let universal = mean_build(DispatchStrategy::UniversalHash);
    let dynamic = mean_build(DispatchStrategy::DynamicArray);

    let ratio = universal / dynamic;
    verdict(
        4,
        ratio >= 10.0,
        &format!(
            "fragmented-mapping build: universal-hash {:.1}us vs dynamic-array {:.1}us, {ratio:.0}x (>= 10x)",
            universal * 1e6,
            dynamic * 1e6
        ),
    );
}

#[test]
fn criterion_05_static_array_storage() {
    let mapping = scenario_mapping(MappingKind::Concise, 42);
    let dispatcher = Dispatcher::build(&mapping, DispatchStrategy::StaticArray, 42).unwrap();
    let bytes = dispatcher.stats().storage_bytes;
    verdict(
        5,
        bytes == 65536 * 8,
        &format!("static-array storage is exactly {bytes} bytes (2^16 slots x 8-byte references)"),
    );
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_06_pipeline_overhead() {
    let started = Instant::now();
    let cmp = bench_pipeline(1_000_000, 42, 5);
    let secs = started.elapsed().as_secs_f64();

    let pass = cmp.runtime_overhead_pct <= 5.0 && cmp.outputs_identical && secs < 600.0;
    let alloc_note = if cmp.alloc_tracked {
        format!(", alloc {:+.2}%", cmp.alloc_overhead_pct)
    } else {
        String::new()
    };
    verdict(
        6,
        pass,
        &format!(
            "modular vs hard-coded over 1M PDUs x 5 reps: runtime {:+.2}% (<= +5%){alloc_note}, \
             outputs identical={}, {secs:.1}s (< 600s)",
            cmp.runtime_overhead_pct, cmp.outputs_identical
        ),
    );
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_07_ptg_routing() {
    // The stacked-VLAN fixture through the stock wiring.
    let reg = build_registry(&Config::default_config(), DispatchStrategy::DynamicArray, 42).unwrap();
    let udp = synth::udp_datagram(5353, 5353, b"probe");
    let ip = synth::ipv4(17, [10, 0, 0, 1], [10, 0, 0, 2], &udp);
    let frame = synth::ethernet(
        DST,
        SRC,
        0x88a8,
        &synth::vlan_payload(100, 0x8100, &synth::vlan_payload(200, 0x0800, &ip)),
    );
    let mut ctx = PacketContext::new(0.0, 1, frame);
    reg.process_packet(&mut ctx);
    let names: Vec<&str> = ctx.layers.iter().map(|l| reg.name_of(l.tag)).collect();
    if names != ["ETHERNET", "VLAN", "VLAN", "IP", "UDP"] || !ctx.failures.is_empty() {
        verdict(7, false, &format!("stacked-VLAN fixture routed as {names:?}"));
        return;
    }

    // 200 random transition graphs, paths up to depth 8.
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    for round in 0..200 {
        let analyzer_count = rng.random_range(3..=10usize);
        let mut builder = RegistryBuilder::new();
        let mut tags = Vec::new();
        for i in 0..analyzer_count {
            tags.push(
                builder
                    .register_analyzer(Box::new(ShimAnalyzer::new(format!("S{i}"))))
                    .unwrap(),
            );
        }
        builder.register_transition(None, 1, tags[0]).unwrap();

        let depth = rng.random_range(1..=7usize);
        let mut used = std::collections::HashSet::new();
        let mut path = vec![0usize];
        let mut ids = Vec::new();
        for _ in 0..depth {
            let parent = *path.last().unwrap();
            let id = loop {
                let candidate = rng.random_range(1..=0xFFFEu16);
                if used.insert((parent, candidate)) {
                    break candidate;
                }
            };
            let next = rng.random_range(0..analyzer_count);
            builder
                .register_transition(Some(tags[parent]), id as u32, tags[next])
                .unwrap();
            path.push(next);
            ids.push(id);
        }
        let reg = builder.freeze(DispatchStrategy::DynamicArray, round).unwrap();

        let mut ctx = PacketContext::new(0.0, 1, shim_chain(&ids));
        reg.process_packet(&mut ctx);
        let got: Vec<String> = ctx.layers.iter().map(|l| reg.name_of(l.tag).to_owned()).collect();
        let want: Vec<String> = path.iter().map(|&i| format!("S{i}")).collect();
        if got != want || !ctx.failures.is_empty() || ctx.layers.len() > 8 {
            verdict(7, false, &format!("random graph {round} routed {got:?}, wanted {want:?}"));
            return;
        }
    }
    verdict(
        7,
        true,
        "stacked-VLAN fixture yields [ETHERNET, VLAN, VLAN, IP, UDP]; 200 random graph paths up to depth 8 route correctly",
    );
}

// ---------------------------------------------------------------- 8-10

struct Logs {
    events: String,
    unknown: String,
    alerts: String,
    summary: RunSummary,
}

/// Data lines of a tab-separated log, header dropped.
fn data_lines(log: &str) -> Vec<&str> {
    log.lines().skip(1).collect()
}

fn run_frames(cfg: &Config, frames: &[(f64, Vec<u8>)]) -> Logs {
    let mut writer = synth::PcapWriter::new(Vec::new(), 1).unwrap();
    for (time, frame) in frames {
        writer.push(*time, frame).unwrap();
    }
    let capture = writer.into_inner();

    let reg = build_registry(cfg, DispatchStrategy::DynamicArray, 42).unwrap();
    let reader = PcapReader::new(Cursor::new(capture)).unwrap();
    let (mut events, mut unknown, mut alerts) = (Vec::new(), Vec::new(), Vec::new());
    let summary = {
        let mut sinks = RunSinks {
            events: &mut events,
            unknown: &mut unknown,
            alerts: &mut alerts,
            alerts_to_stderr: false,
        };
        run_capture(reader, &reg, Routing::Modular, &cfg.options, &mut sinks).unwrap()
    };
    Logs {
        events: String::from_utf8(events).unwrap(),
        unknown: String::from_utf8(unknown).unwrap(),
        alerts: String::from_utf8(alerts).unwrap(),
        summary,
    }
}

fn goose_frames(st_nums: &[u64]) -> Vec<(f64, Vec<u8>)> {
    st_nums
        .iter()
        .enumerate()
        .map(|(i, &st_num)| {
            (
                1000.0 + i as f64 * 0.1,
                synth::goose_frame(
                    SRC,
                    &GooseSpec {
                        st_num,
                        sq_num: 0,
                        ..GooseSpec::default()
                    },
                ),
            )
        })
        .collect()
}

#[test]
fn criterion_08_goose_state_jump_detector() {
    let cfg = Config::default_config();

    let poisoned = run_frames(&cfg, &goose_frames(&[1, 2, 5]));
    let alerts = data_lines(&poisoned.alerts);
    let one_jump = alerts.len() == 1
        && alerts[0].starts_with("1000.200000\tStateNumberJump")
        && poisoned.summary.alerts == 1
        && poisoned.events.matches("goose_message").count() == 3;

    let benign = run_frames(&cfg, &goose_frames(&[1, 1, 2, 2, 3, 4]));
    let quiet = data_lines(&benign.alerts).is_empty() && benign.summary.alerts == 0;

    verdict(
        8,
        one_jump && quiet,
        &format!(
            "stNum 1,2,5 raises exactly one StateNumberJump at the third message ({} alert line); \
             monotone increments raise none",
            alerts.len()
        ),
    );
}

fn dcp_frames(with_set: bool, with_response: bool, with_identify: bool) -> Vec<(f64, Vec<u8>)> {
    const MGMT: synth::Mac = [0x02, 0, 0, 0, 0, 0x10];
    const PLC: synth::Mac = [0x02, 0, 0, 0, 0, 0x20];
    // The station's current name is always on record first.
    let mut frames = vec![(
        1.0,
        synth::ethernet(MGMT, PLC, 0x8892, &synth::identify_response_payload(1, "plc-old")),
    )];
    if with_set {
        frames.push((
            2.0,
            synth::ethernet(PLC, MGMT, 0x8892, &synth::set_request_payload(2, "plc-new")),
        ));
    }
    if with_response {
        frames.push((
            3.0,
            synth::ethernet(MGMT, PLC, 0x8892, &synth::set_response_payload(2, true)),
        ));
    }
    if with_identify {
        frames.push((
            4.0,
            synth::ethernet(
                [0xFF; 6],
                [0x02, 0, 0, 0, 0, 0x30],
                0x8892,
                &synth::identify_request_payload(3, Some("plc-old")),
            ),
        ));
    }
    frames
}

#[test]
fn criterion_09_dcp_rename_detector() {
    let cfg = Config::default_config();

    let full = run_frames(&cfg, &dcp_frames(true, true, true));
    let full_alerts = data_lines(&full.alerts);
    let fires = full_alerts.len() == 1 && full_alerts[0].contains("RenameAttack");

    let omissions = [
        ("set", dcp_frames(false, true, true)),
        ("response", dcp_frames(true, false, true)),
        ("identify", dcp_frames(true, true, false)),
    ];
    let mut quiet = true;
    for (phase, frames) in &omissions {
        let logs = run_frames(&cfg, frames);
        if logs.summary.alerts != 0 {
            quiet = false;
            println!("criterion 09 note: omitting the {phase} phase still alerted");
        }
    }

    verdict(
        9,
        fires && quiet,
        "rename-then-probe sequence raises exactly one RenameAttack; omitting any phase raises none",
    );
}

#[test]
fn criterion_10_unknown_protocol_throttling() {
    // threshold 5, sampling rate 100: 1005 occurrences of one key within
    // the window must come to min(n,T) + (n-T)/S = 5 + 10 = 15 log lines.
    let cfg = Config::from_str(
        r#"{
            "enabled": ["ETHERNET"],
            "registrations": [{ "parent": "ROOT", "id": 1, "child": "ETHERNET" }],
            "options": { "unknown.threshold": 5, "unknown.sampling_rate": 100 }
        }"#,
    )
    .unwrap();
    let frames: Vec<(f64, Vec<u8>)> = (0..1005)
        .map(|i| {
            (
                i as f64 * 0.001,
                synth::ethernet(DST, SRC, 0x9999, b"opaque"),
            )
        })
        .collect();
    let logs = run_frames(&cfg, &frames);
    let lines = data_lines(&logs.unknown).len();
    let counted = logs.summary.unknowns == 1005 && logs.summary.unknowns_logged == 15;

    // Expiry: once capture time moves past the window, counting restarts.
    let expiring = Config::from_str(
        r#"{
            "enabled": ["ETHERNET"],
            "registrations": [{ "parent": "ROOT", "id": 1, "child": "ETHERNET" }],
            "options": {
                "unknown.threshold": 5,
                "unknown.sampling_rate": 100,
                "unknown.duration_secs": 10
            }
        }"#,
    )
    .unwrap();
    let mut frames: Vec<(f64, Vec<u8>)> = (0..10)
        .map(|i| {
            (
                i as f64 * 0.1,
                synth::ethernet(DST, SRC, 0x9999, b"opaque"),
            )
        })
        .collect();
    for i in 0..3 {
        // 20s in: past the 10s window measured from the limiting moment.
        frames.push((
            20.0 + i as f64 * 0.1,
            synth::ethernet(DST, SRC, 0x9999, b"opaque"),
        ));
    }
    let expiry_logs = run_frames(&expiring, &frames);
    let expiry_lines = data_lines(&expiry_logs.unknown).len();

    verdict(
        10,
        lines == 15 && counted && expiry_lines == 8,
        &format!(
            "1005 same-key misses produce exactly {lines} log lines (threshold 5 + every 100th); \
             after window expiry counting restarts ({expiry_lines} lines for 10 + 3 split)"
        ),
    );
}

// ---------------------------------------------------------------- 11

#[test]
fn criterion_11_dissector_fuzz() {
    let started = Instant::now();
    let opts = Options::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCB);
    let mut outcomes = [0u64; 3];
    for name in KNOWN_ANALYZERS {
        let analyzer = build_analyzer(name, &opts).unwrap();
        for round in 0..100_000 {
            let max_len = if round % 16 == 0 { 512 } else { 64 };
            let len = rng.random_range(0..=max_len);
            let raw: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let mut ctx = PacketContext::new(0.0, 1, raw);
            let span = ctx.whole();
            match analyzer.analyze(&mut ctx, span) {
                AnalyzeOutcome::Forward { payload, .. } => {
                    assert!(
                        payload.start > span.start
                            && payload.start <= payload.end
                            && payload.end <= span.end,
                        "{name} forwarded outside its span"
                    );
                    outcomes[0] += 1;
                }
                AnalyzeOutcome::Terminal => outcomes[1] += 1,
                AnalyzeOutcome::Malformed { reason } => {
                    assert!(!reason.is_empty(), "{name} gave no malformed reason");
                    outcomes[2] += 1;
                }
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let total: u64 = outcomes.iter().sum();
    verdict(
        11,
        secs < 300.0,
        &format!(
            "{total} fuzz inputs across {} dissectors, all structured outcomes \
             ({} forward, {} terminal, {} malformed), {secs:.1}s (< 300s)",
            KNOWN_ANALYZERS.len(),
            outcomes[0],
            outcomes[1],
            outcomes[2]
        ),
    );
}

//! Benchmark harnesses: dispatch-strategy measurements on synthetic
//! scenarios, and the full-pipeline comparison of modular routing against
//! the hand-wired baseline.

pub mod alloc;
pub mod stats;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::dispatch::{DispatchStrategy, Dispatcher};
use crate::engine::config::Config;
use crate::engine::hardwired::HardwiredStack;
use crate::io::{generate_scenario, BenchScenario, MappingKind, PcapReader, TrafficKind};
use crate::stack::{build_registry, run_capture, Routing, RunSinks, RunSummary};
use crate::synth::realistic_capture;

use stats::{ci95, sample_stats, Ci95};

pub fn mapping_label(kind: MappingKind) -> &'static str {
    match kind {
        MappingKind::Concise => "concise",
        MappingKind::Fragmented => "fragmented",
    }
}

pub fn traffic_label(kind: TrafficKind) -> &'static str {
    match kind {
        TrafficKind::Realistic => "realistic",
        TrafficKind::Randomized => "randomized",
    }
}

/// One strategy measured on one scenario.
#[derive(Debug, Clone)]
pub struct DispatchCellResult {
    pub strategy: DispatchStrategy,
    pub mapping: MappingKind,
    pub traffic: TrafficKind,
    /// False when the strategy cannot serve the scenario's mapping (the
    /// compiled switch knows only its baked-in tables).
    pub supported: bool,
    pub reps: usize,
    pub lookups_per_rep: u64,
    pub hits: u64,
    pub misses: u64,
    /// Mean cost of one lookup, averaged over repetitions.
    pub mean_lookup_ns: f64,
    pub lookup_ci: Option<Ci95>,
    pub mean_build: Duration,
    pub storage_bytes: usize,
}

/// Builds and measures one cell: `reps` fresh builds, each timed over the
/// whole trace, after one warmup pass.
pub fn bench_dispatch_cell(
    strategy: DispatchStrategy,
    scenario: &BenchScenario,
    reps: usize,
) -> DispatchCellResult {
    assert!(reps >= 1);
    let (mapping, trace) = generate_scenario(scenario);
    let unsupported = || DispatchCellResult {
        strategy,
        mapping: scenario.mapping,
        traffic: scenario.traffic,
        supported: false,
        reps: 0,
        lookups_per_rep: 0,
        hits: 0,
        misses: 0,
        mean_lookup_ns: f64::NAN,
        lookup_ci: None,
        mean_build: Duration::ZERO,
        storage_bytes: 0,
    };
    let Ok(warm) = Dispatcher::build(&mapping, strategy, scenario.seed) else {
        return unsupported();
    };
    let _ = crate::dispatch::measure_dispatch(&warm, &trace);

    let mut lookup_means = Vec::with_capacity(reps);
    let mut build_total = Duration::ZERO;
    let mut last = None;
    let mut storage_bytes = warm.stats().storage_bytes;
    for _ in 0..reps {
        let d = Dispatcher::build(&mapping, strategy, scenario.seed)
            .expect("support was established by the warmup build");
        build_total += d.stats().build_time;
        storage_bytes = d.stats().storage_bytes;
        let timing = crate::dispatch::measure_dispatch(&d, &trace)
            .expect("scenario traces are never empty");
        lookup_means.push(timing.mean_ns());
        last = Some(timing);
    }
    let timing = last.expect("reps >= 1");
    DispatchCellResult {
        strategy,
        mapping: scenario.mapping,
        traffic: scenario.traffic,
        supported: true,
        reps,
        lookups_per_rep: timing.lookups,
        hits: timing.hits,
        misses: timing.misses,
        mean_lookup_ns: sample_stats(&lookup_means).mean,
        lookup_ci: ci95(&lookup_means),
        mean_build: build_total / reps as u32,
        storage_bytes,
    }
}

/// Plain-text table, one row per cell.
pub fn render_dispatch_table(results: &[DispatchCellResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<10} {:<10} {:>12} {:>10} {:>12} {:>12} {:>7}",
        "strategy", "mapping", "traffic", "ns/lookup", "ci95", "build_us", "bytes", "hit%"
    );
    for r in results {
        if !r.supported {
            let _ = writeln!(
                out,
                "{:<16} {:<10} {:<10} {:>12} {:>10} {:>12} {:>12} {:>7}",
                r.strategy.label(),
                mapping_label(r.mapping),
                traffic_label(r.traffic),
                "n/a",
                "-",
                "-",
                "-",
                "-"
            );
            continue;
        }
        let hit_pct = 100.0 * r.hits as f64 / (r.hits + r.misses).max(1) as f64;
        let ci = r
            .lookup_ci
            .map(|c| format!("±{:.2}", c.half_width))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<16} {:<10} {:<10} {:>12.2} {:>10} {:>12.1} {:>12} {:>7.1}",
            r.strategy.label(),
            mapping_label(r.mapping),
            traffic_label(r.traffic),
            r.mean_lookup_ns,
            ci,
            r.mean_build.as_nanos() as f64 / 1e3,
            r.storage_bytes,
            hit_pct
        );
    }
    out
}

/// Machine-readable form of the same rows.
pub fn dispatch_csv(results: &[DispatchCellResult]) -> String {
    let mut out = String::from(
        "strategy,mapping,traffic,supported,reps,lookups_per_rep,hits,misses,mean_lookup_ns,ci95_half_width_ns,mean_build_ns,storage_bytes\n",
    );
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.strategy.label(),
            mapping_label(r.mapping),
            traffic_label(r.traffic),
            r.supported,
            r.reps,
            r.lookups_per_rep,
            r.hits,
            r.misses,
            if r.mean_lookup_ns.is_nan() {
                String::new()
            } else {
                format!("{:.4}", r.mean_lookup_ns)
            },
            r.lookup_ci
                .map(|c| format!("{:.4}", c.half_width))
                .unwrap_or_default(),
            r.mean_build.as_nanos(),
            r.storage_bytes
        );
    }
    out
}

/// One timed end-to-end pass over a capture.
#[derive(Debug, Clone, Copy)]
pub struct PipelineRun {
    pub elapsed: Duration,
    pub summary: RunSummary,
    /// Digest over the three log outputs.
    pub output_digest: u64,
    pub allocated_bytes: u64,
}

fn fnv64(digest: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *digest ^= b as u64;
        *digest = digest.wrapping_mul(0x0000_0100_0000_01B3);
    }
}

fn run_pipeline_once(capture: &[u8], registry: &crate::engine::Registry, routing: Routing<'_>, cfg: &Config) -> PipelineRun {
    let mut events = Vec::new();
    let mut unknown = Vec::new();
    let mut alerts = Vec::new();
    let mut sinks = RunSinks {
        events: &mut events,
        unknown: &mut unknown,
        alerts: &mut alerts,
        alerts_to_stderr: false,
    };
    let allocated_before = alloc::total_allocated();
    let start = Instant::now();
    let reader = PcapReader::new(capture).expect("generated capture has a valid header");
    let summary = run_capture(reader, registry, routing, &cfg.options, &mut sinks)
        .expect("generated capture replays cleanly");
    let elapsed = start.elapsed();
    let allocated_bytes = alloc::total_allocated() - allocated_before;
    let mut output_digest = 0xcbf2_9ce4_8422_2325u64;
    fnv64(&mut output_digest, &events);
    fnv64(&mut output_digest, &unknown);
    fnv64(&mut output_digest, &alerts);
    PipelineRun {
        elapsed,
        summary,
        output_digest,
        allocated_bytes,
    }
}

/// Aggregates of one pipeline variant across repetitions.
#[derive(Debug, Clone, Copy)]
pub struct PipelineSide {
    pub mean_elapsed: Duration,
    pub mean_allocated: f64,
    pub summary: RunSummary,
    pub output_digest: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineComparison {
    pub pdu_count: usize,
    pub reps: usize,
    pub modular: PipelineSide,
    pub hardwired: PipelineSide,
    /// (modular − hardwired) / hardwired, in percent.
    pub runtime_overhead_pct: f64,
    pub alloc_overhead_pct: f64,
    pub outputs_identical: bool,
    /// False when the counting allocator is not installed in this process,
    /// in which case the allocation columns are meaningless.
    pub alloc_tracked: bool,
}

/// Runs the realistic generated capture through both pipelines,
/// alternating repetitions to cancel drift.
pub fn bench_pipeline(pdu_count: usize, seed: u64, reps: usize) -> PipelineComparison {
    assert!(reps >= 1);
    let cfg = Config::default_config();
    let registry = build_registry(&cfg, DispatchStrategy::DynamicArray, seed)
        .expect("default configuration builds");
    let hardwired = HardwiredStack::new(&registry).expect("default registry has all analyzers");
    let capture = realistic_capture(pdu_count, seed);

    // warmup
    let _ = run_pipeline_once(&capture, &registry, Routing::Modular, &cfg);
    let _ = run_pipeline_once(&capture, &registry, Routing::Hardwired(&hardwired), &cfg);

    let mut runs_m = Vec::with_capacity(reps);
    let mut runs_h = Vec::with_capacity(reps);
    for _ in 0..reps {
        runs_m.push(run_pipeline_once(&capture, &registry, Routing::Modular, &cfg));
        runs_h.push(run_pipeline_once(
            &capture,
            &registry,
            Routing::Hardwired(&hardwired),
            &cfg,
        ));
    }
    let side = |runs: &[PipelineRun]| PipelineSide {
        mean_elapsed: runs.iter().map(|r| r.elapsed).sum::<Duration>() / runs.len() as u32,
        mean_allocated: runs.iter().map(|r| r.allocated_bytes as f64).sum::<f64>()
            / runs.len() as f64,
        summary: runs[0].summary,
        output_digest: runs[0].output_digest,
    };
    let modular = side(&runs_m);
    let hardwired_side = side(&runs_h);
    let outputs_identical = runs_m
        .iter()
        .chain(runs_h.iter())
        .all(|r| r.output_digest == modular.output_digest && r.summary == modular.summary);
    let pct = |a: f64, b: f64| if b == 0.0 { f64::NAN } else { (a - b) / b * 100.0 };
    PipelineComparison {
        pdu_count,
        reps,
        modular,
        hardwired: hardwired_side,
        runtime_overhead_pct: pct(
            modular.mean_elapsed.as_secs_f64(),
            hardwired_side.mean_elapsed.as_secs_f64(),
        ),
        alloc_overhead_pct: pct(modular.mean_allocated, hardwired_side.mean_allocated),
        outputs_identical,
        alloc_tracked: alloc::is_installed(),
    }
}

pub fn render_pipeline_table(cmp: &PipelineComparison) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>14} {:>16}",
        "path", "runtime_ms", "allocated_mb"
    );
    let alloc_col = |bytes: f64| {
        if cmp.alloc_tracked {
            format!("{:.2}", bytes / (1024.0 * 1024.0))
        } else {
            "n/a".into()
        }
    };
    let _ = writeln!(
        out,
        "{:<12} {:>14.2} {:>16}",
        "modular",
        cmp.modular.mean_elapsed.as_secs_f64() * 1e3,
        alloc_col(cmp.modular.mean_allocated)
    );
    let _ = writeln!(
        out,
        "{:<12} {:>14.2} {:>16}",
        "hard-coded",
        cmp.hardwired.mean_elapsed.as_secs_f64() * 1e3,
        alloc_col(cmp.hardwired.mean_allocated)
    );
    let alloc_delta = if cmp.alloc_tracked {
        format!("{:+.2}%", cmp.alloc_overhead_pct)
    } else {
        "n/a".into()
    };
    let _ = writeln!(
        out,
        "{:<12} {:>13.2}% {:>16}",
        "difference", cmp.runtime_overhead_pct, alloc_delta
    );
    let _ = writeln!(
        out,
        "outputs identical: {}",
        if cmp.outputs_identical { "yes" } else { "NO" }
    );
    out
}

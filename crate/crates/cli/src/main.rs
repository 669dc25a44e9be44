use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptgflow_core::bench::alloc::CountingAllocator;
use ptgflow_core::bench::{
    bench_dispatch_cell, bench_pipeline, dispatch_csv, render_dispatch_table,
    render_pipeline_table,
};
use ptgflow_core::dispatch::DispatchStrategy;
use ptgflow_core::engine::config::Config;
use ptgflow_core::io::{BenchScenario, MappingKind, PcapReader, TrafficKind};
use ptgflow_core::stack::{build_registry, run_capture, Routing, RunError, RunSinks};

// Installed so `bench pipeline` can report allocation volume; the library
// marks the memory column unavailable when a host process lacks it.
#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

#[derive(Parser)]
#[command(name = "ptgflow", version, about = "Packet analysis engine and dispatch benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the engine over a pcap file and write event/alert logs.
    Analyze(AnalyzeArgs),
    /// Measurement harnesses.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input capture file (pcap, microsecond or nanosecond timestamps).
    #[arg(long)]
    input: PathBuf,
    /// Engine configuration (JSON). Defaults to the built-in stack.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for events.log, unknown_protocols.log, alerts.log.
    #[arg(long)]
    out: PathBuf,
    /// Transition-table strategy override (kebab-case, e.g. dynamic-array).
    #[arg(long)]
    dispatcher: Option<String>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Compare transition-table data structures across traffic scenarios.
    Dispatch(DispatchArgs),
    /// Compare the modular pipeline against a hard-coded protocol walk.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MappingSel {
    Concise,
    Fragmented,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrafficSel {
    Realistic,
    Randomized,
    All,
}

#[derive(Args)]
struct DispatchArgs {
    #[arg(long, value_enum, default_value_t = MappingSel::All)]
    mapping: MappingSel,
    #[arg(long, value_enum, default_value_t = TrafficSel::All)]
    traffic: TrafficSel,
    /// Dispatch operations per measured pass.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pdus: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Measured passes per cell; means and 95% CIs are computed over these.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    /// Also write the results as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pdus: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PTGFLOW_LOG")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Bench(BenchCommand::Dispatch(args)) => cmd_bench_dispatch(&args),
        Command::Bench(BenchCommand::Pipeline(args)) => cmd_bench_pipeline(&args),
    };
    ExitCode::from(code)
}

const EXIT_CONFIG: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn cmd_analyze(args: &AnalyzeArgs) -> u8 {
    let config = match &args.config {
        Some(path) => match Config::from_path(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => Config::default_config(),
    };
    let strategy = match &args.dispatcher {
        Some(text) => match text.parse::<DispatchStrategy>() {
            Ok(s) => s,
            Err(e) => {
                eprintln!("config error: {e}");
                return EXIT_CONFIG;
            }
        },
        None => DispatchStrategy::DynamicArray,
    };
    let registry = match build_registry(&config, strategy, 42) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    log::info!(
        "registry ready: {} analyzers, {} dispatcher",
        registry.analyzer_count(),
        strategy
    );

    let reader = match PcapReader::open(&args.input) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("input error: {e}");
            return EXIT_INPUT;
        }
    };

    let open_log = |name: &str| -> std::io::Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(args.out.join(name))?))
    };
    let sink_result = fs::create_dir_all(&args.out)
        .and_then(|()| Ok((open_log("events.log")?, open_log("unknown_protocols.log")?, open_log("alerts.log")?)));
    let (mut events, mut unknown, mut alerts) = match sink_result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("output error: {e}");
            return EXIT_INPUT;
        }
    };

    let mut sinks = RunSinks {
        events: &mut events,
        unknown: &mut unknown,
        alerts: &mut alerts,
        alerts_to_stderr: true,
    };
    let summary = match run_capture(reader, &registry, Routing::Modular, &config.options, &mut sinks) {
        Ok(s) => s,
        Err(RunError::Capture(e)) => {
            eprintln!("input error: {e}");
            return EXIT_INPUT;
        }
        Err(RunError::Sink(e)) => {
            eprintln!("output error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = events.flush().and_then(|()| unknown.flush()).and_then(|()| alerts.flush()) {
        eprintln!("output error: {e}");
        return EXIT_INPUT;
    }

    println!("packets {}", summary.packets);
    println!("layers {}", summary.layers);
    println!("events {}", summary.events);
    println!("unknowns {}", summary.unknowns);
    println!("alerts {}", summary.alerts);
    0
}

fn cmd_bench_dispatch(args: &DispatchArgs) -> u8 {
    let mappings: &[MappingKind] = match args.mapping {
        MappingSel::Concise => &[MappingKind::Concise],
        MappingSel::Fragmented => &[MappingKind::Fragmented],
        MappingSel::All => &[MappingKind::Concise, MappingKind::Fragmented],
    };
    let traffics: &[TrafficKind] = match args.traffic {
        TrafficSel::Realistic => &[TrafficKind::Realistic],
        TrafficSel::Randomized => &[TrafficKind::Randomized],
        TrafficSel::All => &[TrafficKind::Realistic, TrafficKind::Randomized],
    };

    let mut results = Vec::new();
    for &mapping in mappings {
        for &traffic in traffics {
            let scenario = BenchScenario {
                mapping,
                traffic,
                pdu_count: args.pdus as usize,
                seed: args.seed,
            };
            for strategy in DispatchStrategy::ALL {
                log::info!("measuring {strategy} ({mapping:?} x {traffic:?})");
                results.push(bench_dispatch_cell(strategy, &scenario, args.reps as usize));
            }
        }
    }

    print!("{}", render_dispatch_table(&results));
    if let Some(path) = &args.csv {
        if let Err(e) = fs::write(path, dispatch_csv(&results)) {
            eprintln!("output error: {e}");
            return EXIT_INPUT;
        }
    }
    0
}

fn cmd_bench_pipeline(args: &PipelineArgs) -> u8 {
    let cmp = bench_pipeline(args.pdus as usize, args.seed, args.reps as usize);
    print!("{}", render_pipeline_table(&cmp));
    0
}

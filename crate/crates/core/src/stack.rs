//! Wires the shipped analyzers into a registry according to a
//! configuration, and drives captures through the result: the walk, the
//! three log sinks, and the detectors, shared by the command-line frontend
//! and the pipeline benchmark.

use std::io::{Read, Write};

use thiserror::Error;

use crate::analyzers::{
    ArpAnalyzer, EthernetAnalyzer, GreAnalyzer, IpAnalyzer, LinuxSllAnalyzer, MplsAnalyzer,
    NullAnalyzer, PppAnalyzer, PppoeAnalyzer, SkipAnalyzer, TcpAnalyzer, UdpAnalyzer,
    VlanAnalyzer,
};
use crate::dispatch::DispatchStrategy;
use crate::engine::config::{Config, Options, ROOT_NAME};
use crate::engine::hardwired::HardwiredStack;
use crate::engine::{Analyzer, EngineError, PacketContext, Registry, RegistryBuilder};
use crate::ics::{GooseAnalyzer, ProfinetAnalyzer};
use crate::io::{PcapError, PcapReader};
use crate::policy::{write_alert_line, write_alerts_header, Alert, DcpDetector, GooseDetector};
use crate::telemetry::{
    write_event_line, write_events_header, write_unknown_header, write_unknown_line,
};

/// Constructs one stock analyzer by its registry name.
pub fn build_analyzer(name: &str, opts: &Options) -> Option<Box<dyn Analyzer>> {
    Some(match name {
        "ETHERNET" => Box::new(EthernetAnalyzer::new(
            opts.ethernet_llc_child,
            opts.ethernet_novell_child,
        )),
        "VLAN" => Box::new(VlanAnalyzer),
        "MPLS" => Box::new(MplsAnalyzer::new(opts.mpls_default_child)),
        "PPPOE" => Box::new(PppoeAnalyzer),
        "PPP" => Box::new(PppAnalyzer),
        "ARP" => Box::new(ArpAnalyzer),
        "IP" => Box::new(IpAnalyzer),
        "GRE" => Box::new(GreAnalyzer),
        "SKIP" => Box::new(SkipAnalyzer::new(opts.skip_bytes)),
        "LINUX_SLL" => Box::new(LinuxSllAnalyzer),
        "NULL" => Box::new(NullAnalyzer),
        "TCP" => Box::new(TcpAnalyzer),
        "UDP" => Box::new(UdpAnalyzer),
        "GOOSE" => Box::new(GooseAnalyzer),
        "PROFINET" => Box::new(ProfinetAnalyzer),
        _ => return None,
    })
}

/// Builds the frozen registry a validated configuration describes.
pub fn build_registry(
    cfg: &Config,
    strategy: DispatchStrategy,
    seed: u64,
) -> Result<Registry, EngineError> {
    let mut builder = RegistryBuilder::new().with_throttle(cfg.options.unknown.clone());
    for name in &cfg.enabled {
        let analyzer = build_analyzer(name, &cfg.options).ok_or_else(|| {
            EngineError::UnknownAnalyzer { name: name.clone() }
        })?;
        builder.register_analyzer(analyzer)?;
    }
    for reg in &cfg.registrations {
        let parent = if reg.parent == ROOT_NAME {
            None
        } else {
            Some(builder.tag(&reg.parent).ok_or_else(|| {
                EngineError::UnknownAnalyzer {
                    name: reg.parent.clone(),
                }
            })?)
        };
        let child = builder
            .tag(&reg.child)
            .ok_or_else(|| EngineError::UnknownAnalyzer {
                name: reg.child.clone(),
            })?;
        builder.register_transition(parent, reg.id, child)?;
    }
    builder.freeze(strategy, seed)
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Capture(#[from] PcapError),
    #[error("log write failed: {0}")]
    Sink(#[from] std::io::Error),
}

/// Where a run writes its three logs. Alerts also go to standard error
/// when `alerts_to_stderr` is set.
pub struct RunSinks<'a> {
    pub events: &'a mut dyn Write,
    pub unknown: &'a mut dyn Write,
    pub alerts: &'a mut dyn Write,
    pub alerts_to_stderr: bool,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub packets: u64,
    pub layers: u64,
    pub events: u64,
    pub unknowns: u64,
    pub unknowns_logged: u64,
    pub alerts: u64,
}

/// Routing choice for a run: the registry's transition tables, or the
/// hand-wired baseline bound to the same registry.
pub enum Routing<'a> {
    Modular,
    Hardwired(&'a HardwiredStack<'a>),
}

/// Reads a capture to its end, walking every packet, streaming events and
/// throttled unknown-protocol records to the sinks, and feeding the
/// detectors the engine's configuration enables.
pub fn run_capture<R: Read>(
    mut reader: PcapReader<R>,
    registry: &Registry,
    routing: Routing<'_>,
    opts: &Options,
    sinks: &mut RunSinks<'_>,
) -> Result<RunSummary, RunError> {
    write_events_header(&mut *sinks.events)?;
    write_unknown_header(&mut *sinks.unknown)?;
    write_alerts_header(&mut *sinks.alerts)?;

    let mut goose = opts.detect_goose.then(|| GooseDetector::new(opts.goose_rollover_window));
    let mut dcp = opts.detect_dcp.then(|| DcpDetector::new(opts.dcp_retire_secs));
    let mut summary = RunSummary::default();
    let mut event_seq = 0u64;

    while let Some(record) = reader.next().transpose()? {
        let mut ctx = PacketContext::new(record.time, record.link_type, record.data);
        match routing {
            Routing::Modular => registry.process_packet(&mut ctx),
            Routing::Hardwired(stack) => stack.process_packet(&mut ctx),
        }
        summary.packets += 1;
        summary.layers += ctx.layers.len() as u64;
        for event in &ctx.events {
            event_seq += 1;
            write_event_line(&mut *sinks.events, ctx.capture_time, event)?;
            let mut alert: Option<Alert> = None;
            if let Some(det) = goose.as_mut() {
                alert = det.on_event(event_seq, ctx.capture_time, event);
            }
            if alert.is_none() {
                if let Some(det) = dcp.as_mut() {
                    alert = det.on_event(event_seq, ctx.capture_time, event);
                }
            }
            if let Some(alert) = alert {
                write_alert_line(&mut *sinks.alerts, &alert)?;
                if sinks.alerts_to_stderr {
                    eprintln!("ALERT {} {}", alert.kind, alert.detail);
                }
                summary.alerts += 1;
            }
        }
        summary.events += ctx.events.len() as u64;
        for failure in &ctx.failures {
            summary.unknowns += 1;
            if failure.logged {
                summary.unknowns_logged += 1;
                write_unknown_line(&mut *sinks.unknown, failure)?;
            }
        }
    }
    Ok(summary)
}

//! Operator-editable engine configuration: which analyzers run, how
//! protocols chain together, and per-analyzer options.
//!
//! The file format is JSON with three top-level keys: `enabled` (analyzer
//! names), `registrations` (parent/id/child transition edges; ids are
//! decimal numbers or "0x" hex strings), and `options` (flat dotted keys).

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::dispatch::ProtocolId;
use crate::telemetry::ThrottleConfig;

/// Every analyzer the shipped stack can instantiate. Configurations may
/// enable any subset; names outside this list are rejected.
pub const KNOWN_ANALYZERS: &[&str] = &[
    "ETHERNET",
    "VLAN",
    "MPLS",
    "PPPOE",
    "PPP",
    "ARP",
    "IP",
    "GRE",
    "SKIP",
    "LINUX_SLL",
    "NULL",
    "TCP",
    "UDP",
    "GOOSE",
    "PROFINET",
];

/// Name accepted as a registration parent to mean the root table.
pub const ROOT_NAME: &str = "ROOT";

/// The configuration shipped with the engine: the traditional link/IP
/// stack plus the ICS analyzers and detectors.
pub const DEFAULT_CONFIG: &str = include_str!("default.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read configuration: {0}")]
    Io(#[from] io::Error),
    #[error("configuration parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("configuration field {field}: {message}")]
    Field { field: String, message: String },
    #[error("unknown analyzer: {name}")]
    UnknownAnalyzer { name: String },
}

/// One transition edge from the `registrations` list.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationSpec {
    pub parent: String,
    pub id: ProtocolId,
    pub child: String,
}

/// Typed view of the `options` object.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub skip_bytes: usize,
    pub mpls_default_child: ProtocolId,
    pub unknown: ThrottleConfig,
    pub detect_goose: bool,
    pub detect_dcp: bool,
    /// Alerts fire on stNum jumps except within this window below the
    /// 32-bit counter maximum (rollover tolerance).
    pub goose_rollover_window: u64,
    /// Seconds a retired station name stays suspicious after a rename.
    pub dcp_retire_secs: f64,
    /// Optional children for non-Ethernet-II frames; unset means terminal.
    pub ethernet_llc_child: Option<ProtocolId>,
    pub ethernet_novell_child: Option<ProtocolId>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            skip_bytes: 4,
            mpls_default_child: 0x0800,
            unknown: ThrottleConfig::default(),
            detect_goose: true,
            detect_dcp: true,
            goose_rollover_window: 1000,
            dcp_retire_secs: 300.0,
            ethernet_llc_child: None,
            ethernet_novell_child: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub enabled: Vec<String>,
    pub registrations: Vec<RegistrationSpec>,
    pub options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    enabled: Vec<String>,
    #[serde(default)]
    registrations: Vec<RawRegistration>,
    #[serde(default)]
    options: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegistration {
    parent: String,
    id: serde_json::Value,
    child: String,
}

fn parse_id(value: &serde_json::Value, field: &str) -> Result<ProtocolId, ConfigError> {
    let err = |message: String| ConfigError::Field {
        field: field.to_owned(),
        message,
    };
    match value {
        serde_json::Value::Number(n) => {
            let v = n
                .as_u64()
                .ok_or_else(|| err(format!("identifier must be a non-negative integer, got {n}")))?;
            u32::try_from(v).map_err(|_| err(format!("identifier {v} exceeds 32 bits")))
        }
        serde_json::Value::String(s) => {
            let hex = s
                .strip_prefix("0x")
                .or_else(|| s.strip_prefix("0X"))
                .ok_or_else(|| err(format!("string identifiers must be 0x-hex, got {s:?}")))?;
            u32::from_str_radix(hex, 16)
                .map_err(|e| err(format!("bad hex identifier {s:?}: {e}")))
        }
        other => Err(err(format!(
            "identifier must be a number or 0x-hex string, got {other}"
        ))),
    }
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Self::from_str(&fs::read_to_string(path)?)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;

        let known: HashSet<&str> = KNOWN_ANALYZERS.iter().copied().collect();
        for name in &raw.enabled {
            if !known.contains(name.as_str()) {
                return Err(ConfigError::UnknownAnalyzer { name: name.clone() });
            }
        }
        let enabled: HashSet<&str> = raw.enabled.iter().map(|s| s.as_str()).collect();

        let mut registrations = Vec::with_capacity(raw.registrations.len());
        for (i, r) in raw.registrations.iter().enumerate() {
            let field = format!("registrations[{i}]");
            if r.parent != ROOT_NAME && !enabled.contains(r.parent.as_str()) {
                return Err(ConfigError::UnknownAnalyzer {
                    name: r.parent.clone(),
                });
            }
            if !enabled.contains(r.child.as_str()) {
                return Err(ConfigError::UnknownAnalyzer {
                    name: r.child.clone(),
                });
            }
            registrations.push(RegistrationSpec {
                parent: r.parent.clone(),
                id: parse_id(&r.id, &format!("{field}.id"))?,
                child: r.child.clone(),
            });
        }

        let options = parse_options(&raw.options)?;
        Ok(Config {
            enabled: raw.enabled,
            registrations,
            options,
        })
    }

    /// The embedded default configuration; infallible by construction
    /// (covered by tests).
    pub fn default_config() -> Self {
        Self::from_str(DEFAULT_CONFIG).expect("embedded default configuration is valid")
    }

    pub fn is_enabled(&self, name: &str) -> bool {
        self.enabled.iter().any(|n| n == name)
    }
}

fn parse_options(map: &serde_json::Map<String, serde_json::Value>) -> Result<Options, ConfigError> {
    use serde_json::Value;
    let mut opts = Options::default();
    let field_err = |key: &str, message: String| ConfigError::Field {
        field: format!("options.{key}"),
        message,
    };
    let as_u64 = |key: &str, v: &Value| {
        v.as_u64()
            .ok_or_else(|| field_err(key, format!("expected a non-negative integer, got {v}")))
    };
    let as_f64 = |key: &str, v: &Value| {
        v.as_f64()
            .ok_or_else(|| field_err(key, format!("expected a number, got {v}")))
    };
    let as_bool = |key: &str, v: &Value| {
        v.as_bool()
            .ok_or_else(|| field_err(key, format!("expected a boolean, got {v}")))
    };

    for (key, value) in map {
        match key.as_str() {
            "skip.bytes" => {
                let n = as_u64(key, value)?;
                if n == 0 {
                    return Err(field_err(key, "must be at least 1".into()));
                }
                opts.skip_bytes = n as usize;
            }
            "mpls.default_child" => {
                opts.mpls_default_child = parse_id(value, "options.mpls.default_child")?;
            }
            "unknown.threshold" => {
                let n = as_u64(key, value)?;
                if n == 0 {
                    return Err(field_err(key, "must be at least 1".into()));
                }
                opts.unknown.threshold = n;
            }
            "unknown.sampling_rate" => {
                let n = as_u64(key, value)?;
                if n == 0 {
                    return Err(field_err(key, "must be at least 1".into()));
                }
                opts.unknown.sampling_rate = n;
            }
            "unknown.duration_secs" => {
                let d = as_f64(key, value)?;
                if !(d > 0.0) {
                    return Err(field_err(key, "must be positive".into()));
                }
                opts.unknown.duration_secs = d;
            }
            "unknown.snap_bytes" => {
                opts.unknown.snap_bytes = as_u64(key, value)? as usize;
            }
            "detect.goose" => opts.detect_goose = as_bool(key, value)?,
            "detect.dcp" => opts.detect_dcp = as_bool(key, value)?,
            "goose.rollover_window" => {
                opts.goose_rollover_window = as_u64(key, value)?;
            }
            "dcp.retire_secs" => {
                let d = as_f64(key, value)?;
                if !(d > 0.0) {
                    return Err(field_err(key, "must be positive".into()));
                }
                opts.dcp_retire_secs = d;
            }
            "ethernet.llc_child" => {
                opts.ethernet_llc_child = Some(parse_id(value, "options.ethernet.llc_child")?);
            }
            "ethernet.novell_child" => {
                opts.ethernet_novell_child =
                    Some(parse_id(value, "options.ethernet.novell_child")?);
            }
            _ => {
                return Err(field_err(key, "unknown option".into()));
            }
        }
    }
    Ok(opts)
}

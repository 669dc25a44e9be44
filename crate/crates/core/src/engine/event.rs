//! Events carried from dissectors to policy consumers and the log writers.

use std::fmt;
use std::net::{Ipv4Addr, Ipv6Addr};

/// One typed field value inside an [`Event`].
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    U64(u64),
    /// Unsigned value rendered as 0x-hex in logs (protocol ids, frame ids).
    Hex(u64),
    Bool(bool),
    Str(String),
    Bytes(Vec<u8>),
    Mac([u8; 6]),
    Ipv4(Ipv4Addr),
    Ipv6(Ipv6Addr),
}

impl Value {
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Value::U64(v) | Value::Hex(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_mac(&self) -> Option<[u8; 6]> {
        match self {
            Value::Mac(m) => Some(*m),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::U64(v) => write!(f, "{v}"),
            Value::Hex(v) => write!(f, "{v:#x}"),
            Value::Bool(b) => write!(f, "{b}"),
            // Control characters would corrupt the line-oriented logs.
            Value::Str(s) => {
                for c in s.chars() {
                    let c = if c.is_control() { '.' } else { c };
                    fmt::Write::write_char(f, c)?;
                }
                Ok(())
            }
            Value::Bytes(b) => {
                for byte in b {
                    write!(f, "{byte:02x}")?;
                }
                Ok(())
            }
            Value::Mac(m) => write!(
                f,
                "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
                m[0], m[1], m[2], m[3], m[4], m[5]
            ),
            Value::Ipv4(a) => write!(f, "{a}"),
            Value::Ipv6(a) => write!(f, "{a}"),
        }
    }
}

/// Named record emitted by a dissector, consumed by policies and the
/// event log.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub name: &'static str,
    pub fields: Vec<(&'static str, Value)>,
}

impl Event {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: &'static str, value: Value) -> Self {
        self.fields.push((key, value));
        self
    }

    pub fn opt_field(mut self, key: &'static str, value: Option<Value>) -> Self {
        if let Some(v) = value {
            self.fields.push((key, v));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    /// Space-joined `key=value` rendering used by the event log.
    pub fn format_fields(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }
}

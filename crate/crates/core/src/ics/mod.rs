//! Industrial-control-system analyzers: IEC 61850 GOOSE and the Profinet
//! acyclic real-time channel (DCP). Both ride EtherTypes directly on the
//! link layer and are the protocols the shipped detectors watch.

pub mod ber;
mod goose;
mod profinet;

pub use goose::{parse_goose, GooseAnalyzer, GoosePdu};
pub use profinet::{DcpService, DcpServiceType, ProfinetAnalyzer};

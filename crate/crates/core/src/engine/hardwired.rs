//! A hand-wired routing baseline: the transition tables of the shipped
//! default configuration written out as nested matches the compiler can
//! fold into jump tables. Shares the walk with the modular path, so a
//! pipeline comparison isolates exactly the dispatch mechanism.

use crate::dispatch::{AnalyzerRef, ProtocolId};

use super::{walk_packet, AnalyzerTag, PacketContext, Registry};

#[derive(Clone, Copy)]
struct Node {
    tag: AnalyzerTag,
    target: AnalyzerRef,
}

pub struct HardwiredStack<'a> {
    reg: &'a Registry,
    ethernet: Node,
    vlan: Node,
    mpls: Node,
    pppoe: Node,
    ppp: Node,
    arp: Node,
    ip: Node,
    gre: Node,
    skip: Node,
    linux_sll: Node,
    null: Node,
    tcp: Node,
    udp: Node,
    goose: Node,
    profinet: Node,
}

impl<'a> HardwiredStack<'a> {
    /// Binds against a registry holding all fifteen stock analyzers
    /// (typically built from the default configuration). Routing below
    /// ignores the registry's own tables.
    pub fn new(reg: &'a Registry) -> Option<Self> {
        let node = |name: &str| -> Option<Node> {
            let tag = reg.tag(name)?;
            Some(Node {
                tag,
                target: AnalyzerRef::from_index(tag.index()),
            })
        };
        Some(Self {
            reg,
            ethernet: node("ETHERNET")?,
            vlan: node("VLAN")?,
            mpls: node("MPLS")?,
            pppoe: node("PPPOE")?,
            ppp: node("PPP")?,
            arp: node("ARP")?,
            ip: node("IP")?,
            gre: node("GRE")?,
            skip: node("SKIP")?,
            linux_sll: node("LINUX_SLL")?,
            null: node("NULL")?,
            tcp: node("TCP")?,
            udp: node("UDP")?,
            goose: node("GOOSE")?,
            profinet: node("PROFINET")?,
        })
    }

    #[inline]
    pub fn route(&self, from: Option<AnalyzerTag>, id: ProtocolId) -> Option<AnalyzerRef> {
        let Some(from) = from else {
            // link-layer types
            return match id {
                0 => Some(self.null.target),
                1 => Some(self.ethernet.target),
                9 => Some(self.ppp.target),
                113 => Some(self.linux_sll.target),
                _ => None,
            };
        };
        if from == self.ethernet.tag {
            match id {
                0x0800 | 0x86DD => Some(self.ip.target),
                0x0806 | 0x8035 => Some(self.arp.target),
                0x8100 | 0x88A8 | 0x9100 => Some(self.vlan.target),
                0x8847 => Some(self.mpls.target),
                0x8864 => Some(self.pppoe.target),
                0x8892 => Some(self.profinet.target),
                0x88B8 | 0x88B9 => Some(self.goose.target),
                _ => None,
            }
        } else if from == self.ip.tag {
            match id {
                4 | 41 => Some(self.ip.target),
                6 => Some(self.tcp.target),
                17 => Some(self.udp.target),
                47 => Some(self.gre.target),
                _ => None,
            }
        } else if from == self.vlan.tag {
            match id {
                0x0800 | 0x86DD => Some(self.ip.target),
                0x0806 => Some(self.arp.target),
                0x8100 | 0x88A8 | 0x9100 => Some(self.vlan.target),
                0x8847 => Some(self.mpls.target),
                0x8864 => Some(self.pppoe.target),
                0x8892 => Some(self.profinet.target),
                0x88B8 | 0x88B9 => Some(self.goose.target),
                _ => None,
            }
        } else if from == self.mpls.tag {
            match id {
                0x0800 | 0x86DD => Some(self.ip.target),
                _ => None,
            }
        } else if from == self.pppoe.tag || from == self.ppp.tag {
            match id {
                0x0021 | 0x0057 => Some(self.ip.target),
                _ => None,
            }
        } else if from == self.gre.tag {
            match id {
                0x0800 | 0x86DD => Some(self.ip.target),
                0x0806 => Some(self.arp.target),
                0x6558 => Some(self.ethernet.target),
                _ => None,
            }
        } else if from == self.null.tag {
            match id {
                2 | 24 | 28 | 30 => Some(self.ip.target),
                _ => None,
            }
        } else if from == self.linux_sll.tag {
            match id {
                0x0800 | 0x86DD => Some(self.ip.target),
                0x0806 => Some(self.arp.target),
                0x8100 => Some(self.vlan.target),
                _ => None,
            }
        } else if from == self.skip.tag {
            match id {
                0 => Some(self.ethernet.target),
                _ => None,
            }
        } else {
            // leaves: ARP, TCP, UDP, GOOSE, PROFINET have no children
            None
        }
    }

    pub fn process_packet(&self, ctx: &mut PacketContext) {
        walk_packet(self.reg, |from, id| self.route(from, id), ctx);
    }
}

//! Comparison transmission schemes sharing the episode engine: traditional
//! RNC (always code over the whole block), multicast ARQ (retransmit the
//! lowest packet some user still misses), and round-robin scheduling.
//!
//! Uncoded transmissions reuse the coded-packet machinery as single-support
//! unit vectors, so every scheme runs through one engine and one throughput
//! metric.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::scheduler::{Action, NetworkState};

/// Selectable transmission scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Adaptive RNC with greedy scheduling and optimized hover position.
    Uarnc,
    /// Adaptive RNC hovering over the fixed position (0, 0); no placement.
    UarncFixed,
    /// Traditional random network coding.
    Rnc,
    /// Automatic repeat request (multicast: advance on universal receipt).
    Arq,
    /// Round-robin scheduling of the original packets.
    Rrs,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Uarnc,
        SchemeKind::UarncFixed,
        SchemeKind::Rnc,
        SchemeKind::Arq,
        SchemeKind::Rrs,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Uarnc => "uarnc",
            SchemeKind::UarncFixed => "uarnc-fixed",
            SchemeKind::Rnc => "rnc",
            SchemeKind::Arq => "arq",
            SchemeKind::Rrs => "rrs",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uarnc" => Ok(SchemeKind::Uarnc),
            "uarnc-fixed" => Ok(SchemeKind::UarncFixed),
            "rnc" => Ok(SchemeKind::Rnc),
            "arq" => Ok(SchemeKind::Arq),
            "rrs" => Ok(SchemeKind::Rrs),
            other => Err(format!(
                "unknown scheme '{other}' (expected uarnc | uarnc-fixed | rnc | arq | rrs)"
            )),
        }
    }
}

/// Traditional RNC: every slot codes over all `L` packets.
pub fn rnc_action(state: &NetworkState) -> Action {
    Action::Coded(state.layers())
}

/// Multicast ARQ: send uncoded the smallest packet index not yet held by
/// every user; once everyone holds the whole block, keep repeating the last
/// packet.
pub fn arq_action(state: &NetworkState) -> Action {
    let layers = state.layers();
    for j in 1..=layers {
        if state.users().iter().any(|u| !u.holds_plain(j)) {
            return Action::Plain(j);
        }
    }
    Action::Plain(layers)
}

/// Round-robin: cycle the original packets in priority order regardless of
/// feedback.
pub fn rrs_action(state: &NetworkState) -> Action {
    Action::Plain((state.slot() % state.layers() as usize) as u8 + 1)
}

/// Length of the maximal contiguous prefix {1..l} contained in `held`: the
/// per-user throughput contribution for uncoded schemes, mirroring the
/// decodable prefix for coded ones (a layer is useless without all lower
/// layers).
pub fn useful_packets(held: &BTreeSet<u8>) -> usize {
    let mut l = 0;
    while held.contains(&(l as u8 + 1)) {
        l += 1;
    }
    l
}

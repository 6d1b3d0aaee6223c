//! Line-oriented frame log.
//!
//! One frame per line, fields separated by single spaces:
//!
//! ```text
//! <start_us> <node> <kind> <duration_us> <outcome>
//! ```
//!
//! Times are printed with exactly three decimals (nanosecond resolution).
//! `node` is `ap`, `sta` or `enb`; `kind` is one of `DATA`, `BA`, `BEACON`,
//! `CTS`, `LAA`. `outcome` is `mpdus=<n>` for data, `nav=<us>` for CTS,
//! `overrun` for a block ACK that ends after its window closed, and `ok`
//! otherwise.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::event::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Ap,
    Sta,
    Enb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FrameKind {
    Data,
    #[serde(rename = "BA")]
    BlockAck,
    Beacon,
    Cts,
    Laa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Ok,
    Mpdus(u32),
    Nav(SimTime),
    Overrun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: SimTime,
    pub node: Node,
    pub kind: FrameKind,
    pub duration: SimTime,
    pub outcome: Outcome,
}

impl TraceRecord {
    pub fn end(&self) -> SimTime {
        self.start + self.duration
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Node::Ap => "ap",
            Node::Sta => "sta",
            Node::Enb => "enb",
        })
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Data => "DATA",
            FrameKind::BlockAck => "BA",
            FrameKind::Beacon => "BEACON",
            FrameKind::Cts => "CTS",
            FrameKind::Laa => "LAA",
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Ok => f.write_str("ok"),
            Outcome::Mpdus(n) => write!(f, "mpdus={n}"),
            Outcome::Nav(t) => write!(f, "nav={t}"),
            Outcome::Overrun => f.write_str("overrun"),
        }
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.start, self.node, self.kind, self.duration, self.outcome
        )
    }
}

pub fn write_trace<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

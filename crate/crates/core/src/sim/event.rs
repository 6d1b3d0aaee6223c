use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Simulation clock in integer nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_us(us: f64) -> Self {
        debug_assert!(us >= 0.0, "negative time {us}");
        SimTime((us * 1_000.0).round().max(0.0) as u64)
    }

    pub fn as_us(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1_000, self.0 % 1_000)
    }
}

/// Declaration order is the tie-break order for simultaneous events:
/// channel control first, data last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    NavExpiry,
    WindowBoundary,
    CtsDue,
    BeaconDue,
    TrafficStart,
    AckEnd,
    TxEnd,
    LaaBurstEnd,
    BackoffExpiry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    None,
    /// Generation of the backoff countdown that scheduled the expiry.
    Backoff(u64),
    /// MPDUs acknowledged by the block ACK, zero for beacons.
    Exchange { mpdus: u32 },
    LaaBurst { start: SimTime },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub at: SimTime,
    pub kind: EventKind,
    pub payload: Payload,
    seq: u64,
}

impl SimEvent {
    fn key(&self) -> (SimTime, EventKind, u64) {
        (self.at, self.kind, self.seq)
    }
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<SimEvent>>,
    seq: u64,
}

impl EventQueue {
    pub fn schedule(&mut self, at: SimTime, kind: EventKind, payload: Payload) {
        self.seq += 1;
        self.heap.push(Reverse(SimEvent {
            at,
            kind,
            payload,
            seq: self.seq,
        }));
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|Reverse(e)| e)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

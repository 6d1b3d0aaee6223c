use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::event::{EventKind, EventQueue, Payload, SimTime};
use super::trace::{FrameKind, Node, Outcome, TraceRecord};
use super::{
    laa_window_bursts, next_cts_instant, SimConfig, SimCounts, SimMode, SimResult,
};
use crate::coex::LAA_DATA_FRACTION;
use crate::error::Result;
use crate::params::{
    max_mpdus_per_burst, non_ht_airtime, LaaClassProfile, PhyRateTable, Rat, WifiMacProfile,
    CTS_BYTES, MAX_NAV_US,
};

/// RNG stream of each station; only the AP draws.
const AP_STREAM: u64 = 0;

#[derive(Debug, Clone, Copy)]
struct Countdown {
    /// First slot boundary after DIFS.
    start: SimTime,
    slots: u32,
    generation: u64,
}

struct Timing {
    slot: SimTime,
    difs: SimTime,
    sifs: SimTime,
    phy_header: SimTime,
    block_ack: SimTime,
    beacon: SimTime,
    cts: SimTime,
    ack_delay: SimTime,
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    wifi: WifiMacProfile,
    laa: LaaClassProfile,
    wifi_rate: f64,
    laa_rate: f64,
    max_mpdus: u32,
    t: Timing,
    t_wifi: SimTime,
    t_laa: f64,
    windowed: bool,
    measure_start: SimTime,
    measure_end: SimTime,

    queue: EventQueue,
    rng: ChaCha8Rng,
    now: SimTime,
    busy_until: SimTime,
    window_open: bool,
    window_start: SimTime,
    window_end: SimTime,
    laa_left: f64,
    traffic_on: bool,
    beacon_pending: bool,
    countdown: Option<Countdown>,
    frozen_slots: Option<u32>,
    generation: u64,

    counts: SimCounts,
    delivered_mpdus: u64,
    laa_airtime_us: f64,
    wifi_airtime_us: f64,
    nav_time_us: f64,
    wifi_window_time_us: f64,
    trace: Option<Vec<TraceRecord>>,
}

pub(super) fn run(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let mut engine = Engine::new(cfg)?;
    engine.run();
    Ok(engine.finish())
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a SimConfig) -> Result<Self> {
        let mut wifi = cfg.wifi.clone();
        wifi.payload_bytes = cfg.payload_bytes;
        let rates = PhyRateTable::default();
        let wifi_rate = rates.peak(Rat::WiFi, cfg.bandwidth_mhz)?;
        let laa_rate = rates.peak(Rat::Laa, cfg.bandwidth_mhz)?;
        let laa = LaaClassProfile::for_class(cfg.laa_class)?.exclusive();
        let max_mpdus = max_mpdus_per_burst(&wifi, wifi_rate, wifi.max_ppdu_duration);
        let t = Timing {
            slot: SimTime::from_us(wifi.slot_time),
            difs: SimTime::from_us(wifi.difs),
            sifs: SimTime::from_us(wifi.sifs),
            phy_header: SimTime::from_us(wifi.phy_header_time),
            block_ack: SimTime::from_us(wifi.block_ack_airtime()),
            beacon: SimTime::from_us(non_ht_airtime(cfg.beacon_bytes, wifi.basic_rate)),
            cts: SimTime::from_us(non_ht_airtime(CTS_BYTES, wifi.basic_rate)),
            ack_delay: SimTime::from_us(cfg.ack_delay.map_or(0.0, |h| h.extra_us)),
        };
        let (t_wifi, t_laa) = match cfg.mode {
            SimMode::Dfm => (0.0, 0.0),
            SimMode::Dtm => (cfg.t_wifi_us.unwrap_or(0.0), cfg.t_laa_us.unwrap_or(0.0)),
        };
        let windowed = cfg.mode == SimMode::Dtm && t_laa > 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(AP_STREAM);
        let measure_start = SimTime::from_us(cfg.warmup_us);
        Ok(Engine {
            cfg,
            wifi,
            laa,
            wifi_rate,
            laa_rate,
            max_mpdus,
            t,
            t_wifi: SimTime::from_us(t_wifi),
            t_laa,
            windowed,
            measure_start,
            measure_end: measure_start + SimTime::from_us(cfg.measure_us),
            queue: EventQueue::default(),
            rng,
            now: SimTime::ZERO,
            busy_until: SimTime::ZERO,
            window_open: true,
            window_start: SimTime::ZERO,
            window_end: SimTime(u64::MAX),
            laa_left: 0.0,
            traffic_on: false,
            beacon_pending: false,
            countdown: None,
            frozen_slots: None,
            generation: 0,
            counts: SimCounts::default(),
            delivered_mpdus: 0,
            laa_airtime_us: 0.0,
            wifi_airtime_us: 0.0,
            nav_time_us: 0.0,
            wifi_window_time_us: 0.0,
            trace: cfg.trace.then(Vec::new),
        })
    }

    fn run(&mut self) {
        if self.cfg.beacon_interval_us.is_some() {
            self.queue.schedule(SimTime::ZERO, EventKind::BeaconDue, Payload::None);
        }
        self.queue.schedule(self.measure_start, EventKind::TrafficStart, Payload::None);
        if self.windowed {
            self.open_window();
        }
        while let Some(ev) = self.queue.pop() {
            if ev.at > self.measure_end {
                break;
            }
            self.now = ev.at;
            match ev.kind {
                EventKind::TrafficStart => {
                    self.traffic_on = true;
                    self.try_contend();
                }
                EventKind::BeaconDue => self.on_beacon_due(),
                EventKind::BackoffExpiry => {
                    if let Payload::Backoff(generation) = ev.payload {
                        self.on_backoff_expiry(generation);
                    }
                }
                EventKind::TxEnd => {
                    if let Payload::Exchange { mpdus } = ev.payload {
                        self.on_tx_end(mpdus);
                    }
                }
                EventKind::AckEnd => {
                    if let Payload::Exchange { mpdus } = ev.payload {
                        self.on_ack_end(mpdus);
                    }
                }
                EventKind::WindowBoundary => self.on_window_boundary(),
                EventKind::CtsDue => self.on_cts_due(),
                EventKind::NavExpiry => self.on_nav_expiry(),
                EventKind::LaaBurstEnd => {
                    if let Payload::LaaBurst { start } = ev.payload {
                        self.on_laa_burst_end(start);
                    }
                }
            }
        }
        if self.windowed && self.window_open {
            self.wifi_window_time_us += self.measured(self.window_start, self.measure_end);
        }
    }

    fn finish(mut self) -> SimResult {
        let measure = self.cfg.measure_us;
        let bits = self.delivered_mpdus as f64 * f64::from(self.wifi.payload_bytes) * 8.0;
        self.counts.mpdus_delivered = self.delivered_mpdus;
        let trace = self.trace.take().map(|mut t| {
            t.sort_by_key(|r| r.start);
            t
        });
        SimResult {
            seed: self.cfg.seed,
            mode: self.cfg.mode,
            bandwidth_mhz: self.cfg.bandwidth_mhz,
            wifi_throughput: bits / measure,
            laa_airtime_throughput: self.laa_airtime_us * LAA_DATA_FRACTION * self.laa_rate / measure,
            counts: self.counts,
            nav_time_us: self.nav_time_us,
            wifi_window_time_us: if self.windowed { self.wifi_window_time_us } else { measure },
            wifi_airtime_us: self.wifi_airtime_us,
            measure_us: measure,
            trace,
        }
    }

    /// Length of `[from, to)` inside the measurement interval, in µs.
    fn measured(&self, from: SimTime, to: SimTime) -> f64 {
        let a = from.max(self.measure_start);
        let b = to.min(self.measure_end);
        if b > a {
            (b - a).as_us()
        } else {
            0.0
        }
    }

    fn log(&mut self, start: SimTime, node: Node, kind: FrameKind, duration: SimTime, outcome: Outcome) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRecord {
                start,
                node,
                kind,
                duration,
                outcome,
            });
        }
    }

    fn has_frame(&self) -> bool {
        self.traffic_on || self.beacon_pending
    }

    fn try_contend(&mut self) {
        if self.countdown.is_some()
            || !self.has_frame()
            || !self.window_open
            || self.now < self.busy_until
        {
            return;
        }
        let slots = match self.frozen_slots.take() {
            Some(s) => s,
            None => self.draw_slots(),
        };
        self.generation += 1;
        let start = self.now + self.t.difs;
        self.countdown = Some(Countdown {
            start,
            slots,
            generation: self.generation,
        });
        let expiry = start + SimTime(self.t.slot.0 * u64::from(slots));
        self.queue.schedule(expiry, EventKind::BackoffExpiry, Payload::Backoff(self.generation));
    }

    /// Counter drawn from [0, CW - 1]; the frame goes out on the slot
    /// boundary after the counter reaches zero.
    fn draw_slots(&mut self) -> u32 {
        self.rng.random_range(0..self.wifi.cw_min) + 1
    }

    fn freeze(&mut self) {
        if let Some(c) = self.countdown.take() {
            let elapsed = if self.now > c.start {
                ((self.now - c.start).0 / self.t.slot.0) as u32
            } else {
                0
            };
            self.frozen_slots = Some(c.slots.saturating_sub(elapsed).max(1));
        }
    }

    fn on_beacon_due(&mut self) {
        self.beacon_pending = true;
        if let Some(interval) = self.cfg.beacon_interval_us {
            self.queue
                .schedule(self.now + SimTime::from_us(interval), EventKind::BeaconDue, Payload::None);
        }
        self.try_contend();
    }

    fn budget(&self) -> Option<SimTime> {
        self.windowed.then(|| self.window_end.saturating_sub(self.now))
    }

    /// MPDUs whose data PPDU and block ACK both finish within `budget`.
    fn fitting_mpdus(&self, budget: Option<SimTime>) -> u32 {
        let Some(budget) = budget else {
            return self.max_mpdus;
        };
        let overhead = self.t.phy_header + self.t.sifs + self.t.block_ack;
        if budget <= overhead {
            return 0;
        }
        let per_mpdu = self.wifi.subframe_airtime(self.wifi_rate);
        let mut n = (((budget - overhead).as_us()) / per_mpdu).floor().min(f64::from(self.max_mpdus)) as u32;
        while n > 0 && self.exchange_airtime(n) > budget {
            n -= 1;
        }
        n
    }

    fn data_airtime(&self, n: u32) -> SimTime {
        SimTime::from_us(
            self.wifi.ppdu_airtime(n, self.wifi_rate) + self.wifi.data_tail_pad(n, self.wifi_rate),
        )
    }

    fn exchange_airtime(&self, n: u32) -> SimTime {
        self.data_airtime(n) + self.t.sifs + self.t.block_ack
    }

    fn on_backoff_expiry(&mut self, generation: u64) {
        match self.countdown {
            Some(c) if c.generation == generation => self.countdown = None,
            _ => return,
        }
        let budget = self.budget();
        if self.beacon_pending && budget.map_or(true, |b| self.t.beacon <= b) {
            self.beacon_pending = false;
            self.counts.beacons += 1;
            self.busy_until = self.now + self.t.beacon;
            self.log(self.now, Node::Ap, FrameKind::Beacon, self.t.beacon, Outcome::Ok);
            self.queue
                .schedule(self.busy_until, EventKind::TxEnd, Payload::Exchange { mpdus: 0 });
            return;
        }
        let n = if self.traffic_on { self.fitting_mpdus(budget) } else { 0 };
        if n == 0 {
            // Nothing fits before the window closes; hold until it reopens.
            self.frozen_slots = Some(1);
            return;
        }
        let data = self.data_airtime(n);
        self.counts.data_bursts += 1;
        self.wifi_airtime_us += self.measured(self.now, self.now + data);
        self.busy_until = self.now + data + self.t.sifs + self.t.block_ack + self.t.ack_delay;
        self.log(self.now, Node::Ap, FrameKind::Data, data, Outcome::Mpdus(n));
        self.queue
            .schedule(self.now + data, EventKind::TxEnd, Payload::Exchange { mpdus: n });
    }

    fn on_tx_end(&mut self, mpdus: u32) {
        if mpdus == 0 {
            self.try_contend();
            return;
        }
        let ba_start = self.busy_until - self.t.block_ack;
        let outcome = if self.windowed && self.busy_until > self.window_end {
            Outcome::Overrun
        } else {
            Outcome::Ok
        };
        self.log(ba_start, Node::Sta, FrameKind::BlockAck, self.t.block_ack, outcome);
        self.queue
            .schedule(self.busy_until, EventKind::AckEnd, Payload::Exchange { mpdus });
    }

    fn on_ack_end(&mut self, mpdus: u32) {
        if self.now > self.measure_start && self.now <= self.measure_end {
            self.delivered_mpdus += u64::from(mpdus);
        }
        self.try_contend();
    }

    fn open_window(&mut self) {
        self.window_open = true;
        self.window_start = self.now;
        self.window_end = self.now + self.t_wifi;
        self.counts.wifi_windows += 1;
        self.queue.schedule(self.window_end, EventKind::WindowBoundary, Payload::None);
    }

    fn on_window_boundary(&mut self) {
        self.window_open = false;
        self.wifi_window_time_us += self.measured(self.window_start, self.now);
        self.freeze();
        let cts = next_cts_instant(self.busy_until, self.now, self.t.sifs);
        if cts.overrun {
            self.counts.window_overruns += 1;
        }
        self.laa_left = self.t_laa;
        self.counts.laa_windows += 1;
        self.queue.schedule(cts.at, EventKind::CtsDue, Payload::None);
    }

    fn on_cts_due(&mut self) {
        let nav_us = self.laa_left.min(MAX_NAV_US);
        self.laa_left -= nav_us;
        let nav = SimTime::from_us(nav_us);
        let cts_end = self.now + self.t.cts;
        self.counts.cts_frames += 1;
        self.log(self.now, Node::Ap, FrameKind::Cts, self.t.cts, Outcome::Nav(nav));
        self.nav_time_us += self.measured(cts_end, cts_end + nav);
        for (offset, len) in laa_window_bursts(nav_us, self.laa.txop, self.laa.laa_slot) {
            let start = cts_end + SimTime::from_us(offset);
            let end = start + SimTime::from_us(len);
            self.log(start, Node::Enb, FrameKind::Laa, end - start, Outcome::Ok);
            self.queue.schedule(end, EventKind::LaaBurstEnd, Payload::LaaBurst { start });
        }
        self.queue.schedule(cts_end + nav, EventKind::NavExpiry, Payload::None);
    }

    fn on_nav_expiry(&mut self) {
        if self.laa_left > 0.0 {
            self.queue.schedule(self.now + self.t.sifs, EventKind::CtsDue, Payload::None);
            return;
        }
        self.open_window();
        self.try_contend();
    }

    fn on_laa_burst_end(&mut self, start: SimTime) {
        self.counts.laa_bursts += 1;
        self.laa_airtime_us += self.measured(start, self.now);
    }
}

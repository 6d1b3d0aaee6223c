//! Seeded discrete-event simulation of a saturated 802.11ac downlink, alone
//! on its channel (DFM) or time-sharing it with LAA through CTS-to-self (DTM).

mod engine;
pub mod event;
pub mod trace;

use serde::{Deserialize, Serialize};

use crate::coex::LAA_DATA_FRACTION;
use crate::error::{Error, Result};
use crate::params::{LaaClassProfile, WifiMacProfile, MAX_NAV_US};

pub use event::{EventKind, SimEvent, SimTime};
pub use trace::{write_trace, FrameKind, Node, Outcome, TraceRecord};

pub const DEFAULT_SEED: u64 = 20_190_101;
pub const DEFAULT_WARMUP_US: f64 = 100_000.0;
pub const DEFAULT_MEASURE_US: f64 = 10_000_000.0;
pub const DEFAULT_BEACON_BYTES: u32 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Dfm,
    Dtm,
}

/// Adds a fixed delay to every block ACK, as if the receiver answered late.
/// Exists to exercise window overruns, which saturated downlink alone never
/// causes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckDelayHook {
    pub extra_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub mode: SimMode,
    pub bandwidth_mhz: u32,
    pub laa_class: u8,
    pub payload_bytes: u32,
    pub t_wifi_us: Option<f64>,
    pub t_laa_us: Option<f64>,
    pub warmup_us: f64,
    pub measure_us: f64,
    /// `None` disables beacons.
    pub beacon_interval_us: Option<f64>,
    pub beacon_bytes: u32,
    pub trace: bool,
    pub wifi: WifiMacProfile,
    #[serde(skip)]
    pub ack_delay: Option<AckDelayHook>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let wifi = WifiMacProfile::table2();
        SimConfig {
            seed: DEFAULT_SEED,
            mode: SimMode::Dfm,
            bandwidth_mhz: 20,
            laa_class: 1,
            payload_bytes: wifi.payload_bytes,
            t_wifi_us: None,
            t_laa_us: None,
            warmup_us: DEFAULT_WARMUP_US,
            measure_us: DEFAULT_MEASURE_US,
            beacon_interval_us: Some(wifi.beacon_interval),
            beacon_bytes: DEFAULT_BEACON_BYTES,
            trace: false,
            wifi,
            ack_delay: None,
        }
    }
}

impl SimConfig {
    pub fn dfm(bandwidth_mhz: u32, seed: u64) -> Self {
        SimConfig {
            seed,
            bandwidth_mhz,
            ..SimConfig::default()
        }
    }

    pub fn dtm(bandwidth_mhz: u32, t_wifi_us: f64, t_laa_us: f64, seed: u64) -> Self {
        SimConfig {
            seed,
            mode: SimMode::Dtm,
            bandwidth_mhz,
            t_wifi_us: Some(t_wifi_us),
            t_laa_us: Some(t_laa_us),
            ..SimConfig::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.measure_us > 0.0) {
            return Err(Error::invalid("measure_us", "must be positive"));
        }
        if !(self.warmup_us >= 0.0) {
            return Err(Error::invalid("warmup_us", "must be non-negative"));
        }
        if let Some(b) = self.beacon_interval_us {
            if !(b > 0.0) {
                return Err(Error::invalid("beacon_interval_us", "must be positive"));
            }
        }
        if self.payload_bytes == 0 {
            return Err(Error::invalid("payload_bytes", "must be positive"));
        }
        self.wifi.validate()?;
        LaaClassProfile::for_class(self.laa_class)?;
        crate::params::peak_phy_rate(crate::params::Rat::WiFi, self.bandwidth_mhz)?;
        if self.mode == SimMode::Dtm {
            match (self.t_wifi_us, self.t_laa_us) {
                (Some(w), Some(l)) if w >= 0.0 && l >= 0.0 && w + l > 0.0 => {}
                _ => {
                    return Err(Error::Config(
                        "DTM needs non-negative t_wifi_us and t_laa_us, not both zero".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimCounts {
    pub data_bursts: u64,
    pub mpdus_delivered: u64,
    pub beacons: u64,
    pub cts_frames: u64,
    pub wifi_windows: u64,
    pub laa_windows: u64,
    pub window_overruns: u64,
    pub laa_bursts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub seed: u64,
    pub mode: SimMode,
    pub bandwidth_mhz: u32,
    pub wifi_throughput: f64,
    pub laa_airtime_throughput: f64,
    pub counts: SimCounts,
    /// Time stations spent silenced by NAV inside the measurement interval.
    pub nav_time_us: f64,
    /// Time the Wi-Fi window was open inside the measurement interval.
    pub wifi_window_time_us: f64,
    pub wifi_airtime_us: f64,
    pub measure_us: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

pub fn run_dfm_simulation(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.mode != SimMode::Dfm {
        return Err(Error::Config("run_dfm_simulation needs mode = dfm".into()));
    }
    engine::run(cfg)
}

pub fn run_dtm_simulation(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.mode != SimMode::Dtm {
        return Err(Error::Config("run_dtm_simulation needs mode = dtm".into()));
    }
    engine::run(cfg)
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimResult> {
    engine::run(cfg)
}

/// Offsets and lengths (µs) of the bursts an LAA eNB fits into one
/// reservation: full TXOPs with one idle LAA slot between bursts, the last
/// burst shortened to whole slots.
pub fn laa_window_bursts(window: f64, txop: f64, laa_slot: f64) -> Vec<(f64, f64)> {
    let mut bursts = Vec::new();
    let mut t = 0.0;
    loop {
        let remaining = window - t;
        if remaining + 1e-9 < laa_slot {
            break;
        }
        let len = txop.min((remaining / laa_slot + 1e-9).floor() * laa_slot);
        bursts.push((t, len));
        t += len + laa_slot;
    }
    bursts
}

/// Splits an LAA window into the NAV lengths of its CTS reservations.
pub fn reservation_chunks(t_laa: f64) -> Vec<f64> {
    let mut chunks = Vec::new();
    let mut left = t_laa;
    while left > 0.0 {
        let nav = left.min(MAX_NAV_US);
        chunks.push(nav);
        left -= nav;
    }
    chunks
}

/// LAA throughput delivered by one LAA window per DTM period.
pub fn laa_window_airtime(t_laa: f64, profile: &LaaClassProfile, laa_rate: f64, period: f64) -> f64 {
    if !(period > 0.0) {
        return 0.0;
    }
    let airtime: f64 = reservation_chunks(t_laa)
        .into_iter()
        .flat_map(|chunk| laa_window_bursts(chunk, profile.exclusive_txop, profile.laa_slot))
        .map(|(_, len)| len)
        .sum();
    airtime * LAA_DATA_FRACTION * laa_rate / period
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CtsTiming {
    pub at: SimTime,
    /// An exchange was still running when the window closed.
    pub overrun: bool,
}

/// When the AP sends the CTS that closes a Wi-Fi window: a SIFS after the
/// boundary, or after the in-flight exchange if one runs past it.
pub fn next_cts_instant(exchange_end: SimTime, window_end: SimTime, sifs: SimTime) -> CtsTiming {
    CtsTiming {
        at: exchange_end.max(window_end) + sifs,
        overrun: exchange_end > window_end,
    }
}

//! PHY/MAC constants, rate tables and burst-size arithmetic.
//!
//! All durations are `f64` microseconds and all rates are Mbps, so a size in
//! bits divided by a rate is directly a duration in µs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on a VHT PPDU, regardless of MCS.
pub const MAX_PPDU_US: f64 = 5484.0;
/// MPDUs a single block ACK can acknowledge.
pub const MAX_AMPDU_MPDUS: u32 = 64;
/// Largest A-MPDU length exponent a VHT station may advertise.
pub const MAX_AMPDU_EXP: u8 = 7;
pub const OFDM_SYMBOL_US: f64 = 4.0;
/// Non-HT (legacy) preamble: 10 short symbols of 0.8 µs plus 2 long symbols.
pub const NON_HT_PREAMBLE_US: f64 = 10.0 * 0.8 + 2.0 * 4.0;
/// Non-HT SIGNAL field.
pub const NON_HT_SIGNAL_US: f64 = 4.0;
pub const SERVICE_BITS: u32 = 16;
pub const TAIL_BITS: u32 = 6;
/// Longest NAV a single CTS duration field can carry.
pub const MAX_NAV_US: f64 = 32_767.0;
pub const CTS_BYTES: u32 = 14;

/// Partial-subframe lengths an LAA burst may end with.
pub const PARTIAL_SUBFRAMES_US: [f64; 9] = [
    0.0, 214.29, 428.57, 500.0, 642.86, 714.29, 785.71, 857.14, 1000.0,
];

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rat {
    #[serde(rename = "wifi")]
    WiFi,
    #[serde(rename = "laa")]
    Laa,
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::WiFi => f.write_str("Wi-Fi"),
            Rat::Laa => f.write_str("LAA"),
        }
    }
}

/// How the PHY tail/padding and the block-ACK preamble enter burst durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BurstAccounting {
    /// One PHY header per exchange and no symbol padding. Reproduces the
    /// published no-coexistence capacities exactly.
    #[default]
    Compact,
    /// Data and block-ACK PSDUs padded to whole OFDM symbols, and the block
    /// ACK carries its own PHY header.
    Padded,
}

/// Airtime of a non-HT frame of `bytes` sent at `rate` Mbps (20 MHz OFDM).
pub fn non_ht_airtime(bytes: u32, rate: f64) -> f64 {
    let bits_per_symbol = rate * OFDM_SYMBOL_US;
    let psdu_bits = f64::from(SERVICE_BITS + 8 * bytes + TAIL_BITS);
    let symbols = (psdu_bits / bits_per_symbol - EPS).ceil();
    NON_HT_PREAMBLE_US + NON_HT_SIGNAL_US + symbols * OFDM_SYMBOL_US
}

/// Time from the end of a PSDU to the next OFDM symbol boundary.
pub fn symbol_pad(airtime: f64) -> f64 {
    let symbols = (airtime / OFDM_SYMBOL_US - EPS).ceil().max(0.0);
    (symbols * OFDM_SYMBOL_US - airtime).max(0.0)
}

/// Anything that runs a binary-exponential backoff.
pub trait Backoff {
    fn cw_min(&self) -> u32;
    fn cw_max(&self) -> u32;
    fn max_retries(&self) -> u32;

    /// Window size at retransmission stage `stage`; counters are drawn from
    /// `0..window`.
    fn contention_window(&self, stage: u32) -> u32 {
        let doubled = self.cw_min().checked_shl(stage).filter(|w| *w >= self.cw_min());
        doubled.map_or(self.cw_max(), |w| w.min(self.cw_max()))
    }
}

pub fn contention_window(profile: &impl Backoff, stage: u32) -> u32 {
    profile.contention_window(stage)
}

/// 802.11ac MAC/PHY parameters. Serialized keys follow the table row names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WifiMacProfile {
    #[serde(rename = "sigma_us")]
    pub slot_time: f64,
    pub aifsn: u32,
    #[serde(rename = "sifs_us")]
    pub sifs: f64,
    #[serde(rename = "difs_us")]
    pub difs: f64,
    #[serde(rename = "cw_min_w")]
    pub cw_min: u32,
    #[serde(rename = "cw_max_w")]
    pub cw_max: u32,
    #[serde(rename = "m_w")]
    pub max_retries: u32,
    #[serde(rename = "br_mbps")]
    pub basic_rate: f64,
    #[serde(rename = "max_txop_w_us")]
    pub max_ppdu_duration: f64,
    pub ampdu_exp: u8,
    #[serde(rename = "n_w")]
    pub max_mpdus: u32,
    #[serde(rename = "t_phy_us")]
    pub phy_header_time: f64,
    #[serde(rename = "d_mpdu_bytes")]
    pub delimiter_bytes: u32,
    #[serde(rename = "d_mac_bytes")]
    pub mac_header_bytes: u32,
    #[serde(rename = "d_llc_bytes")]
    pub llc_header_bytes: u32,
    #[serde(rename = "d_data_bytes")]
    pub payload_bytes: u32,
    #[serde(rename = "d_blockack_bytes")]
    pub block_ack_bytes: u32,
    #[serde(rename = "ack_tout_us")]
    pub ack_timeout: f64,
    #[serde(rename = "beacon_interval_us")]
    pub beacon_interval: f64,
    pub burst_accounting: BurstAccounting,
}

impl Default for WifiMacProfile {
    fn default() -> Self {
        Self::table2()
    }
}

impl WifiMacProfile {
    /// Default 802.11ac parameters used throughout the analytical evaluation.
    pub fn table2() -> Self {
        let slot_time = 9.0;
        let sifs = 16.0;
        let aifsn = 2;
        WifiMacProfile {
            slot_time,
            aifsn,
            sifs,
            difs: sifs + f64::from(aifsn) * slot_time,
            cw_min: 16,
            cw_max: 1024,
            max_retries: 7,
            basic_rate: 6.0,
            max_ppdu_duration: MAX_PPDU_US,
            ampdu_exp: MAX_AMPDU_EXP,
            max_mpdus: MAX_AMPDU_MPDUS,
            phy_header_time: 40.0,
            delimiter_bytes: 4,
            mac_header_bytes: 34,
            llc_header_bytes: 8,
            payload_bytes: 1500,
            block_ack_bytes: 32,
            ack_timeout: 50.0,
            beacon_interval: 102_400.0,
            burst_accounting: BurstAccounting::Compact,
        }
    }

    pub fn with_payload(mut self, bytes: u32) -> Self {
        self.payload_bytes = bytes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma_us", self.slot_time),
            ("sifs_us", self.sifs),
            ("difs_us", self.difs),
            ("br_mbps", self.basic_rate),
            ("max_txop_w_us", self.max_ppdu_duration),
            ("t_phy_us", self.phy_header_time),
            ("ack_tout_us", self.ack_timeout),
            ("beacon_interval_us", self.beacon_interval),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        let sizes = [
            ("d_mpdu_bytes", self.delimiter_bytes),
            ("d_mac_bytes", self.mac_header_bytes),
            ("d_llc_bytes", self.llc_header_bytes),
            ("d_data_bytes", self.payload_bytes),
            ("d_blockack_bytes", self.block_ack_bytes),
            ("cw_min_w", self.cw_min),
            ("n_w", self.max_mpdus),
        ];
        for (name, v) in sizes {
            if v == 0 {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        let expected_difs = self.sifs + f64::from(self.aifsn) * self.slot_time;
        if (self.difs - expected_difs).abs() > EPS {
            return Err(Error::invalid(
                "difs_us",
                format!("expected SIFS + AIFSN·σ = {expected_difs}, got {}", self.difs),
            ));
        }
        check_cw_bounds("cw_min_w", self.cw_min, self.cw_max)?;
        if self.ampdu_exp > MAX_AMPDU_EXP {
            return Err(Error::AmpduExponent(self.ampdu_exp));
        }
        if self.max_mpdus > MAX_AMPDU_MPDUS {
            return Err(Error::invalid("n_w", format!("at most {MAX_AMPDU_MPDUS}")));
        }
        Ok(())
    }

    /// MAC frame length without the A-MPDU delimiter.
    pub fn mpdu_length(&self) -> u32 {
        self.mac_header_bytes + self.llc_header_bytes + self.payload_bytes
    }

    /// One A-MPDU subframe: delimiter, MAC and LLC headers, payload.
    pub fn subframe_bytes(&self) -> u32 {
        self.delimiter_bytes + self.mpdu_length()
    }

    pub fn subframe_airtime(&self, data_rate: f64) -> f64 {
        f64::from(self.subframe_bytes()) * 8.0 / data_rate
    }

    /// PSDU airtime of an `n`-MPDU burst, PHY header included.
    pub fn ppdu_airtime(&self, n: u32, data_rate: f64) -> f64 {
        self.phy_header_time + f64::from(n) * self.subframe_airtime(data_rate)
    }

    /// Tail and pad time after a data PSDU of `n` MPDUs.
    pub fn data_tail_pad(&self, n: u32, data_rate: f64) -> f64 {
        match self.burst_accounting {
            BurstAccounting::Compact => 0.0,
            BurstAccounting::Padded => symbol_pad(f64::from(n) * self.subframe_airtime(data_rate)),
        }
    }

    pub fn block_ack_tail_pad(&self) -> f64 {
        match self.burst_accounting {
            BurstAccounting::Compact => 0.0,
            BurstAccounting::Padded => symbol_pad(self.block_ack_psdu_airtime()),
        }
    }

    fn block_ack_psdu_airtime(&self) -> f64 {
        f64::from(self.block_ack_bytes) * 8.0 / self.basic_rate
    }

    /// Block ACK airtime at the basic rate, including its tail/pad and, under
    /// padded accounting, its own PHY header.
    pub fn block_ack_airtime(&self) -> f64 {
        let header = match self.burst_accounting {
            BurstAccounting::Compact => 0.0,
            BurstAccounting::Padded => self.phy_header_time,
        };
        header + self.block_ack_psdu_airtime() + self.block_ack_tail_pad()
    }
}

impl Backoff for WifiMacProfile {
    fn cw_min(&self) -> u32 {
        self.cw_min
    }
    fn cw_max(&self) -> u32 {
        self.cw_max
    }
    fn max_retries(&self) -> u32 {
        self.max_retries
    }
}

fn check_cw_bounds(name: &'static str, min: u32, max: u32) -> Result<()> {
    if !min.is_power_of_two() || !max.is_power_of_two() {
        return Err(Error::invalid(name, format!("windows {min}/{max} must be powers of two")));
    }
    if min > max {
        return Err(Error::invalid(name, format!("CW_min {min} exceeds CW_max {max}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CcaType {
    TypeA1,
    #[default]
    TypeA2,
    TypeB,
}

/// Parameters shared by every LAA priority class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaaCommon {
    pub sigma_us: f64,
    pub t_f_us: f64,
    pub t_laaslot_us: f64,
    pub gamma_us: f64,
    pub carrier_rate_mbps: f64,
    pub lbt_cca: CcaType,
}

impl Default for LaaCommon {
    fn default() -> Self {
        LaaCommon {
            sigma_us: 9.0,
            t_f_us: 16.0,
            t_laaslot_us: 500.0,
            gamma_us: 250.0,
            carrier_rate_mbps: 75.4,
            lbt_cca: CcaType::TypeA2,
        }
    }
}

/// Channel-access priority class parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaaClassParams {
    pub class: u8,
    pub m_l: u32,
    pub cw_min_l: u32,
    pub cw_max_l: u32,
    #[serde(rename = "retries_l")]
    pub max_retries: u32,
    /// TXOP while contending with Wi-Fi.
    pub txop_l_us: f64,
    /// TXOP when the channel is reserved for LAA.
    pub txop_l_sharing_us: f64,
}

impl LaaClassParams {
    pub fn class1() -> Self {
        LaaClassParams {
            class: 1,
            m_l: 1,
            cw_min_l: 4,
            cw_max_l: 16,
            max_retries: 6,
            txop_l_us: 2000.0,
            txop_l_sharing_us: 2000.0,
        }
    }

    pub fn class4() -> Self {
        LaaClassParams {
            class: 4,
            m_l: 7,
            cw_min_l: 16,
            cw_max_l: 1024,
            max_retries: 10,
            txop_l_us: 8000.0,
            txop_l_sharing_us: 10_000.0,
        }
    }

    pub fn for_class(class: u8) -> Result<Self> {
        match class {
            1 => Ok(Self::class1()),
            4 => Ok(Self::class4()),
            c => Err(Error::invalid("class", format!("only classes 1 and 4 are tabulated, got {c}"))),
        }
    }
}

/// A fully resolved LAA transmitter: common parameters plus one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaaClassProfile {
    pub class: u8,
    pub slot_time: f64,
    pub defer_base: f64,
    pub defer_slots: u32,
    pub defer_total: f64,
    pub cw_min: u32,
    pub cw_max: u32,
    pub max_retries: u32,
    /// Active TXOP used by the contention model.
    pub txop: f64,
    /// TXOP used when LAA has the channel to itself (DTM, DFM, no coexistence).
    pub exclusive_txop: f64,
    pub laa_slot: f64,
    pub gamma: f64,
    pub per_carrier_rate: f64,
    pub multichannel_cca: CcaType,
}

impl Default for LaaClassProfile {
    fn default() -> Self {
        Self::class1()
    }
}

impl LaaClassProfile {
    pub fn compose(common: &LaaCommon, class: &LaaClassParams) -> Result<Self> {
        let profile = LaaClassProfile {
            class: class.class,
            slot_time: common.sigma_us,
            defer_base: common.t_f_us,
            defer_slots: class.m_l,
            defer_total: common.t_f_us + f64::from(class.m_l) * common.sigma_us,
            cw_min: class.cw_min_l,
            cw_max: class.cw_max_l,
            max_retries: class.max_retries,
            txop: class.txop_l_us,
            exclusive_txop: class.txop_l_sharing_us,
            laa_slot: common.t_laaslot_us,
            gamma: common.gamma_us,
            per_carrier_rate: common.carrier_rate_mbps,
            multichannel_cca: common.lbt_cca,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn class1() -> Self {
        Self::compose(&LaaCommon::default(), &LaaClassParams::class1()).expect("class 1 preset")
    }

    pub fn class4() -> Self {
        Self::compose(&LaaCommon::default(), &LaaClassParams::class4()).expect("class 4 preset")
    }

    pub fn for_class(class: u8) -> Result<Self> {
        Self::compose(&LaaCommon::default(), &LaaClassParams::for_class(class)?)
    }

    /// Same profile with the TXOP an exclusively reserved channel allows.
    pub fn exclusive(&self) -> Self {
        LaaClassProfile {
            txop: self.exclusive_txop,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma_us", self.slot_time),
            ("t_f_us", self.defer_base),
            ("txop_l_us", self.txop),
            ("txop_l_sharing_us", self.exclusive_txop),
            ("t_laaslot_us", self.laa_slot),
            ("carrier_rate_mbps", self.per_carrier_rate),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.cw_min == 0 {
            return Err(Error::invalid("cw_min_l", "must be positive"));
        }
        check_cw_bounds("cw_min_l", self.cw_min, self.cw_max)?;
        let t_d = self.defer_base + f64::from(self.defer_slots) * self.slot_time;
        if (self.defer_total - t_d).abs() > EPS {
            return Err(Error::invalid("t_d_us", format!("expected T_f + m_l·σ = {t_d}")));
        }
        if (self.gamma - self.laa_slot / 2.0).abs() > EPS {
            return Err(Error::invalid("gamma_us", "must equal half an LAA slot"));
        }
        Ok(())
    }
}

impl Backoff for LaaClassProfile {
    fn cw_min(&self) -> u32 {
        self.cw_min
    }
    fn cw_max(&self) -> u32 {
        self.cw_max
    }
    fn max_retries(&self) -> u32 {
        self.max_retries
    }
}

/// Peak physical data rates per bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhyRateTable {
    pub wifi: BTreeMap<u32, f64>,
    pub laa: BTreeMap<u32, f64>,
}

impl Default for PhyRateTable {
    fn default() -> Self {
        PhyRateTable {
            wifi: [(20, 86.7), (40, 200.0), (80, 433.3), (160, 866.7)].into(),
            laa: [(20, 75.4), (40, 150.8), (60, 226.1), (80, 301.5), (100, 376.9)].into(),
        }
    }
}

impl PhyRateTable {
    /// Least-squares slope (through the origin) of LAA rate against carrier count.
    pub fn laa_per_carrier_slope(&self) -> f64 {
        let (num, den) = self.laa.iter().fold((0.0, 0.0), |(num, den), (&bw, &rate)| {
            let n = f64::from(bw / 20);
            (num + n * rate, den + n * n)
        });
        num / den
    }

    pub fn peak(&self, rat: Rat, bandwidth_mhz: u32) -> Result<f64> {
        match rat {
            Rat::WiFi => self.wifi.get(&bandwidth_mhz).copied().ok_or(Error::UnsupportedBandwidth {
                rat,
                mhz: bandwidth_mhz,
            }),
            Rat::Laa => {
                if bandwidth_mhz == 0 || bandwidth_mhz % 20 != 0 {
                    return Err(Error::NotCarrierMultiple(bandwidth_mhz));
                }
                Ok(self.laa.get(&bandwidth_mhz).copied().unwrap_or_else(|| {
                    f64::from(bandwidth_mhz / 20) * self.laa_per_carrier_slope()
                }))
            }
        }
    }
}

pub fn peak_phy_rate(rat: Rat, bandwidth_mhz: u32) -> Result<f64> {
    PhyRateTable::default().peak(rat, bandwidth_mhz)
}

/// Maximum A-MPDU length in bytes for a station advertising `ampdu_exp`.
pub fn ampdu_limit_bytes(ampdu_exp: u8, mpdu_length: u32) -> Result<u64> {
    if ampdu_exp > MAX_AMPDU_EXP {
        return Err(Error::AmpduExponent(ampdu_exp));
    }
    if mpdu_length == 0 {
        return Err(Error::invalid("mpdu_length", "must be positive"));
    }
    let exp_limit = (1u64 << (13 + u32::from(ampdu_exp))) - 1;
    let ba_limit = u64::from(MAX_AMPDU_MPDUS) * (u64::from(mpdu_length) + 4);
    Ok(exp_limit.min(ba_limit))
}

/// Largest number of MPDUs whose PPDU fits both the A-MPDU byte limit and
/// `min(max PPDU duration, duration_cap)`.
pub fn max_mpdus_per_burst(profile: &WifiMacProfile, data_rate: f64, duration_cap: f64) -> u32 {
    if !(data_rate > 0.0) || !(duration_cap > 0.0) {
        return 0;
    }
    let cap = profile.max_ppdu_duration.min(duration_cap);
    let Ok(limit) = ampdu_limit_bytes(profile.ampdu_exp, profile.mpdu_length()) else {
        return 0;
    };
    let by_bytes = limit / u64::from(profile.subframe_bytes());
    let by_count = u64::from(profile.max_mpdus.min(MAX_AMPDU_MPDUS));
    let by_time = ((cap - profile.phy_header_time) / profile.subframe_airtime(data_rate) + EPS).floor();
    let by_time = if by_time < 0.0 { 0 } else { by_time as u64 };
    by_bytes.min(by_count).min(by_time) as u32
}

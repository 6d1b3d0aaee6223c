//! Saturation model of Wi-Fi and LAA transmitters contending for one channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    max_mpdus_per_burst, Backoff, LaaClassProfile, PhyRateTable, Rat, WifiMacProfile,
};

const FLOOR_SLACK: f64 = 1e-9;
/// Share of LAA airtime that carries data (one of every fourteen symbols is control).
pub const LAA_DATA_FRACTION: f64 = 13.0 / 14.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexScenario {
    pub wifi: WifiMacProfile,
    pub laa: LaaClassProfile,
    pub bandwidth_mhz: u32,
    pub n_w: u32,
    pub n_l: u32,
    pub wifi_rate: f64,
    pub laa_rate: f64,
    /// Probability that a Wi-Fi burst overlapping an LAA burst corrupts it.
    pub p_fc: f64,
    pub aifs_n: u32,
    /// Extra bound on Wi-Fi PPDU airtime on top of the standard 5.484 ms.
    pub wifi_burst_cap: f64,
}

impl CoexScenario {
    /// One Wi-Fi AP and one LAA eNB sharing `bandwidth_mhz`.
    pub fn new(bandwidth_mhz: u32, laa: LaaClassProfile) -> Result<Self> {
        let rates = PhyRateTable::default();
        let wifi = WifiMacProfile::table2();
        Ok(CoexScenario {
            wifi_burst_cap: wifi.max_ppdu_duration,
            aifs_n: wifi.aifsn,
            wifi,
            laa,
            bandwidth_mhz,
            n_w: 1,
            n_l: 1,
            wifi_rate: rates.peak(Rat::WiFi, bandwidth_mhz)?,
            laa_rate: rates.peak(Rat::Laa, bandwidth_mhz)?,
            p_fc: 1.0,
        })
    }

    /// A scenario where only `rat` transmits, on `bandwidth_mhz`.
    pub fn isolated(rat: Rat, bandwidth_mhz: u32, laa: LaaClassProfile) -> Result<Self> {
        let wifi = WifiMacProfile::table2();
        let base = CoexScenario {
            wifi_burst_cap: wifi.max_ppdu_duration,
            aifs_n: wifi.aifsn,
            wifi,
            laa,
            bandwidth_mhz,
            n_w: 0,
            n_l: 0,
            wifi_rate: 0.0,
            laa_rate: 0.0,
            p_fc: 1.0,
        };
        base.retarget(rat, bandwidth_mhz)
    }

    /// Same profiles on a different bandwidth with only `rat` active.
    pub fn retarget(&self, rat: Rat, bandwidth_mhz: u32) -> Result<Self> {
        let rate = PhyRateTable::default().peak(rat, bandwidth_mhz)?;
        let mut scn = self.clone();
        scn.bandwidth_mhz = bandwidth_mhz;
        match rat {
            Rat::WiFi => {
                scn.wifi_rate = rate;
                scn.n_w = 1;
                scn.n_l = 0;
            }
            Rat::Laa => {
                scn.laa_rate = rate;
                scn.n_w = 0;
                scn.n_l = 1;
            }
        }
        Ok(scn)
    }

    pub fn with_nodes(mut self, n_w: u32, n_l: u32) -> Self {
        self.n_w = n_w;
        self.n_l = n_l;
        self
    }

    pub fn with_payload(mut self, bytes: u32) -> Self {
        self.wifi.payload_bytes = bytes;
        self
    }

    pub fn with_wifi_profile(mut self, wifi: WifiMacProfile) -> Self {
        self.wifi = wifi;
        self
    }

    pub fn with_laa_profile(mut self, laa: LaaClassProfile) -> Self {
        self.laa = laa;
        self
    }

    pub fn with_rates(mut self, wifi_rate: f64, laa_rate: f64) -> Self {
        self.wifi_rate = wifi_rate;
        self.laa_rate = laa_rate;
        self
    }

    pub fn with_p_fc(mut self, p_fc: f64) -> Self {
        self.p_fc = p_fc;
        self
    }

    pub fn cca_min(&self) -> u32 {
        self.aifs_n.min(self.laa.defer_slots)
    }

    pub fn mpdus_per_burst(&self) -> u32 {
        max_mpdus_per_burst(&self.wifi, self.wifi_rate, self.wifi_burst_cap)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_w + self.n_l == 0 {
            return Err(Error::invalid("n_w + n_l", "at least one transmitter required"));
        }
        if !(0.0..=1.0).contains(&self.p_fc) {
            return Err(Error::invalid("p_fc", format!("{} outside [0, 1]", self.p_fc)));
        }
        if self.n_w > 0 {
            self.wifi.validate()?;
            if !(self.wifi_rate > 0.0) {
                return Err(Error::ZeroRate);
            }
        }
        if self.n_l > 0 {
            self.laa.validate()?;
            if !(self.laa_rate > 0.0) {
                return Err(Error::ZeroRate);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub pc_w: f64,
    pub pc_l: f64,
    pub pb_w: f64,
    pub pb_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub tau_w: f64,
    pub tau_l: f64,
    pub pc_w: f64,
    pub pc_l: f64,
    pub pb_w: f64,
    pub pb_l: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl Equilibrium {
    /// An equilibrium pinned at the given transmission probabilities.
    pub fn at(tau_w: f64, tau_l: f64, scn: &CoexScenario) -> Self {
        let c = coupling_step(tau_w, tau_l, scn);
        Equilibrium {
            tau_w,
            tau_l,
            pc_w: c.pc_w,
            pc_l: c.pc_l,
            pb_w: c.pb_w,
            pb_l: c.pb_l,
            residual: 0.0,
            iterations: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventProbs {
    pub p_idle: f64,
    pub ps_w: f64,
    pub ps_l: f64,
    pub pc_ww: f64,
    pub pc_ll: f64,
    pub pc_wl: f64,
}

impl EventProbs {
    pub fn total(&self) -> f64 {
        self.p_idle + self.ps_w + self.ps_l + self.pc_ww + self.pc_ll + self.pc_wl
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstDurations {
    pub ts_w: f64,
    pub tc_w: f64,
    pub ts_l: f64,
    pub tc_l: f64,
    pub t_tail_pad_data: f64,
    pub t_tail_pad_ba: f64,
    pub mpdus: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub damping: f64,
    pub initial_tau: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            damping: 0.5,
            initial_tau: 0.05,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

fn wifi_burst(scn: &CoexScenario) -> Result<(u32, f64, f64)> {
    if !(scn.wifi_rate > 0.0) {
        return Err(Error::ZeroRate);
    }
    let n = scn.mpdus_per_burst();
    if n == 0 {
        return Err(Error::EmptyBurst);
    }
    let pad = scn.wifi.data_tail_pad(n, scn.wifi_rate);
    let airtime = scn.wifi.difs + scn.wifi.ppdu_airtime(n, scn.wifi_rate) + pad;
    Ok((n, airtime, pad))
}

pub fn wifi_success_duration(scn: &CoexScenario) -> Result<f64> {
    let (_, data, _) = wifi_burst(scn)?;
    Ok(data + scn.wifi.sifs + scn.wifi.block_ack_airtime())
}

pub fn wifi_collision_duration(scn: &CoexScenario) -> Result<f64> {
    let (_, data, _) = wifi_burst(scn)?;
    Ok(data + scn.wifi.ack_timeout)
}

pub fn laa_burst_duration(profile: &LaaClassProfile) -> f64 {
    profile.gamma + profile.txop
}

/// Durations of every event type. Wi-Fi terms are zero when no Wi-Fi node is
/// present.
pub fn burst_durations(scn: &CoexScenario) -> Result<BurstDurations> {
    let laa = laa_burst_duration(&scn.laa);
    let mut dur = BurstDurations {
        ts_w: 0.0,
        tc_w: 0.0,
        ts_l: laa,
        tc_l: laa,
        t_tail_pad_data: 0.0,
        t_tail_pad_ba: 0.0,
        mpdus: 0,
    };
    if scn.n_w > 0 {
        let (n, _, pad) = wifi_burst(scn)?;
        dur.ts_w = wifi_success_duration(scn)?;
        dur.tc_w = wifi_collision_duration(scn)?;
        dur.t_tail_pad_data = pad;
        dur.t_tail_pad_ba = scn.wifi.block_ack_tail_pad();
        dur.mpdus = n;
    }
    Ok(dur)
}

/// Stationary probability of the first backoff state of a chain whose
/// transmissions collide with probability `pc` and whose countdown is blocked
/// with probability `pb`.
pub fn backoff_root_probability(profile: &impl Backoff, pc: f64, pb: f64) -> Result<f64> {
    if pb >= 1.0 {
        return Err(Error::DegenerateBlocking);
    }
    let free = 1.0 - pb;
    let mut sum = 0.0;
    let mut weight = 1.0;
    for stage in 0..=profile.max_retries() {
        let cw = f64::from(profile.contention_window(stage));
        sum += weight * (1.0 + (2.0 + free * (cw - 1.0)) / (2.0 * free));
        weight *= pc;
    }
    Ok(1.0 / sum)
}

pub fn transmission_probability(b00: f64, pc: f64, max_retries: u32) -> f64 {
    let mut sum = 0.0;
    let mut weight = 1.0;
    for _ in 0..=max_retries {
        sum += weight;
        weight *= pc;
    }
    (b00 * sum).clamp(0.0, 1.0)
}

fn powu(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

/// Collision and blocking probabilities seen by each RAT given both
/// transmission probabilities.
pub fn coupling_step(tau_w: f64, tau_l: f64, scn: &CoexScenario) -> Coupling {
    let cca_min = scn.cca_min();
    let mut c = Coupling {
        pc_w: 0.0,
        pc_l: 0.0,
        pb_w: 0.0,
        pb_l: 0.0,
    };
    if scn.n_w > 0 {
        let quiet = powu(1.0 - tau_l, scn.n_l) * powu(1.0 - tau_w, scn.n_w - 1);
        c.pc_w = 1.0 - quiet;
        c.pb_w = 1.0 - powu(quiet, scn.aifs_n.saturating_sub(cca_min) + 1);
    }
    if scn.n_l > 0 {
        let others = powu(1.0 - tau_l, scn.n_l - 1);
        let wifi_quiet = powu(1.0 - tau_w, scn.n_w);
        c.pc_l = 1.0 - ((1.0 - scn.p_fc) + scn.p_fc * wifi_quiet) * others;
        let exponent = scn.laa.defer_slots.saturating_sub(cca_min) + 1;
        c.pb_l = 1.0 - powu(wifi_quiet * others, exponent);
    }
    c
}

fn next_taus(tau_w: f64, tau_l: f64, scn: &CoexScenario) -> Result<(f64, f64, Coupling)> {
    let c = coupling_step(tau_w, tau_l, scn);
    let tw = if scn.n_w > 0 {
        let b00 = backoff_root_probability(&scn.wifi, c.pc_w, c.pb_w)?;
        transmission_probability(b00, c.pc_w, scn.wifi.max_retries)
    } else {
        0.0
    };
    let tl = if scn.n_l > 0 {
        let b00 = backoff_root_probability(&scn.laa, c.pc_l, c.pb_l)?;
        transmission_probability(b00, c.pc_l, scn.laa.max_retries)
    } else {
        0.0
    };
    Ok((tw, tl, c))
}

/// Largest change one pass of the fixed-point map makes to `eq`'s τ values.
pub fn fixed_point_defect(eq: &Equilibrium, scn: &CoexScenario) -> Result<f64> {
    let (tw, tl, _) = next_taus(eq.tau_w, eq.tau_l, scn)?;
    Ok((tw - eq.tau_w).abs().max((tl - eq.tau_l).abs()))
}

pub fn solve_equilibrium(scn: &CoexScenario) -> Result<Equilibrium> {
    solve_equilibrium_with(scn, &SolverOptions::default())
}

pub fn solve_equilibrium_with(scn: &CoexScenario, opts: &SolverOptions) -> Result<Equilibrium> {
    scn.validate()?;
    let mut tw = if scn.n_w > 0 { opts.initial_tau } else { 0.0 };
    let mut tl = if scn.n_l > 0 { opts.initial_tau } else { 0.0 };
    let mut residual = f64::INFINITY;
    for iterations in 0..opts.max_iterations {
        let (nw, nl, c) = next_taus(tw, tl, scn)?;
        residual = (nw - tw).abs().max((nl - tl).abs());
        if residual <= opts.tolerance {
            return Ok(Equilibrium {
                tau_w: tw,
                tau_l: tl,
                pc_w: c.pc_w,
                pc_l: c.pc_l,
                pb_w: c.pb_w,
                pb_l: c.pb_l,
                residual,
                iterations,
            });
        }
        tw += opts.damping * (nw - tw);
        tl += opts.damping * (nl - tl);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

pub fn event_probabilities(eq: &Equilibrium, scn: &CoexScenario) -> EventProbs {
    let none_w = powu(1.0 - eq.tau_w, scn.n_w);
    let none_l = powu(1.0 - eq.tau_l, scn.n_l);
    let one_w = if scn.n_w > 0 {
        f64::from(scn.n_w) * eq.tau_w * powu(1.0 - eq.tau_w, scn.n_w - 1)
    } else {
        0.0
    };
    let one_l = if scn.n_l > 0 {
        f64::from(scn.n_l) * eq.tau_l * powu(1.0 - eq.tau_l, scn.n_l - 1)
    } else {
        0.0
    };
    EventProbs {
        p_idle: none_w * none_l,
        ps_w: one_w * none_l,
        ps_l: one_l * none_w,
        pc_ww: none_l * (1.0 - none_w - one_w).max(0.0),
        pc_ll: none_w * (1.0 - none_l - one_l).max(0.0),
        pc_wl: (1.0 - none_w) * (1.0 - none_l),
    }
}

pub fn mean_slot_duration(probs: &EventProbs, dur: &BurstDurations, slot_time: f64) -> f64 {
    probs.ps_w * dur.ts_w
        + probs.ps_l * dur.ts_l
        + probs.pc_ww * dur.tc_w
        + probs.pc_ll * dur.tc_l
        + probs.pc_wl * dur.tc_w.max(dur.tc_l)
        + probs.p_idle * slot_time
}

/// Whole LAA slots of a burst that outlast a colliding Wi-Fi burst.
pub fn surviving_laa_airtime(dur: &BurstDurations, laa_slot: f64) -> f64 {
    let excess = (dur.tc_l - dur.tc_w).max(0.0);
    (excess / laa_slot + FLOOR_SLACK).floor() * laa_slot
}

pub fn wifi_throughput(eq: &Equilibrium, scn: &CoexScenario) -> Result<f64> {
    if scn.n_w == 0 {
        return Ok(0.0);
    }
    let dur = burst_durations(scn)?;
    let probs = event_probabilities(eq, scn);
    let t_cs = mean_slot_duration(&probs, &dur, scn.wifi.slot_time);
    let bits = f64::from(dur.mpdus) * f64::from(scn.wifi.payload_bytes) * 8.0;
    Ok(probs.ps_w * bits / t_cs)
}

pub fn laa_throughput(eq: &Equilibrium, scn: &CoexScenario) -> Result<f64> {
    if scn.n_l == 0 {
        return Ok(0.0);
    }
    let dur = burst_durations(scn)?;
    let probs = event_probabilities(eq, scn);
    let t_cs = mean_slot_duration(&probs, &dur, scn.wifi.slot_time);
    let delivered = probs.ps_l * scn.laa.txop
        + probs.pc_wl * surviving_laa_airtime(&dur, scn.laa.laa_slot);
    Ok(LAA_DATA_FRACTION * scn.laa_rate * delivered / t_cs)
}

/// Everything the model says about one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoexOutcome {
    pub equilibrium: Equilibrium,
    pub events: EventProbs,
    pub durations: BurstDurations,
    pub mean_slot_us: f64,
    pub wifi_mbps: f64,
    pub laa_mbps: f64,
}

pub fn evaluate(scn: &CoexScenario) -> Result<CoexOutcome> {
    let equilibrium = solve_equilibrium(scn)?;
    let events = event_probabilities(&equilibrium, scn);
    let durations = burst_durations(scn)?;
    Ok(CoexOutcome {
        equilibrium,
        events,
        durations,
        mean_slot_us: mean_slot_duration(&events, &durations, scn.wifi.slot_time),
        wifi_mbps: wifi_throughput(&equilibrium, scn)?,
        laa_mbps: laa_throughput(&equilibrium, scn)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcCapacity {
    pub mbps: f64,
    /// False when not even one MPDU (Wi-Fi) or any airtime (LAA) fits the cap.
    pub feasible: bool,
}

impl NcCapacity {
    const INFEASIBLE: NcCapacity = NcCapacity {
        mbps: 0.0,
        feasible: false,
    };
}

/// Capacity of `rat` operating alone with bursts no longer than `cap` µs.
/// LAA uses its exclusive-operation TXOP.
pub fn capacity_no_coex(rat: Rat, scn: &CoexScenario, cap: f64) -> Result<NcCapacity> {
    if !(cap > 0.0) {
        return Ok(NcCapacity::INFEASIBLE);
    }
    let mut alone = scn.clone();
    match rat {
        Rat::WiFi => {
            alone.n_w = 1;
            alone.n_l = 0;
            alone.wifi_burst_cap = scn.wifi_burst_cap.min(cap);
            if alone.mpdus_per_burst() == 0 {
                return Ok(NcCapacity::INFEASIBLE);
            }
            let eq = solve_equilibrium(&alone)?;
            Ok(NcCapacity {
                mbps: wifi_throughput(&eq, &alone)?,
                feasible: true,
            })
        }
        Rat::Laa => {
            alone.n_w = 0;
            alone.n_l = 1;
            alone.laa = scn.laa.exclusive();
            alone.laa.txop = alone.laa.txop.min(cap);
            let eq = solve_equilibrium(&alone)?;
            Ok(NcCapacity {
                mbps: laa_throughput(&eq, &alone)?,
                feasible: true,
            })
        }
    }
}

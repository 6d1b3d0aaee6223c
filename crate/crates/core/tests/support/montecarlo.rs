//! Slot-level Monte Carlo of the contention model.
//!
//! Every node runs its own backoff chain: blocked defer slots, a uniform
//! countdown, then a transmission that fails with the collision probability
//! its RAT sees. Chains are independent given those probabilities. Each
//! replication first finds the transmission probabilities by a stochastic
//! fixed point, then freezes the coupling and counts slot outcomes.

use dynshare_core::coex::{burst_durations, coupling_step, surviving_laa_airtime, LAA_DATA_FRACTION};
use dynshare_core::params::Backoff;
use dynshare_core::CoexScenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
enum Phase {
    Defer,
    Countdown(u32),
    Transmit,
}

#[derive(Debug, Clone, Copy)]
struct Chain {
    stage: u32,
    phase: Phase,
    max_retries: u32,
}

impl Chain {
    fn new(max_retries: u32) -> Self {
        Chain {
            stage: 0,
            phase: Phase::Defer,
            max_retries,
        }
    }

    /// Advances one slot; true when the node transmits in it.
    fn step(&mut self, profile: &impl Backoff, pc: f64, pb: f64, rng: &mut ChaCha8Rng) -> bool {
        match self.phase {
            Phase::Defer => {
                if rng.random::<f64>() >= pb {
                    let cw = profile.contention_window(self.stage);
                    let k = rng.random_range(0..cw);
                    self.phase = if k == 0 { Phase::Transmit } else { Phase::Countdown(k) };
                }
                false
            }
            Phase::Countdown(k) => {
                self.phase = if k == 1 { Phase::Transmit } else { Phase::Countdown(k - 1) };
                false
            }
            Phase::Transmit => {
                if rng.random::<f64>() < pc && self.stage < self.max_retries {
                    self.stage += 1;
                } else {
                    self.stage = 0;
                }
                self.phase = Phase::Defer;
                true
            }
        }
    }
}

fn empirical_tau(
    profile: &impl Backoff,
    max_retries: u32,
    pc: f64,
    pb: f64,
    slots: u64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let mut chain = Chain::new(max_retries);
    let tx = (0..slots).filter(|_| chain.step(profile, pc, pb, rng)).count();
    tx as f64 / slots as f64
}

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub fixed_point_rounds: usize,
    pub fixed_point_slots: u64,
    pub measure_slots: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            fixed_point_rounds: 40,
            fixed_point_slots: 25_000,
            measure_slots: 250_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct McEstimate {
    pub tau_w: f64,
    pub tau_l: f64,
    pub wifi_mbps: f64,
    pub laa_mbps: f64,
}

pub fn replicate(scn: &CoexScenario, opts: &McOptions, seed: u64) -> McEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut tw, mut tl) = (
        if scn.n_w > 0 { 0.05 } else { 0.0 },
        if scn.n_l > 0 { 0.05 } else { 0.0 },
    );
    // Polyak averaging over the second half of the rounds.
    let (mut sum_w, mut sum_l, mut n_avg) = (0.0, 0.0, 0usize);
    for round in 0..opts.fixed_point_rounds {
        let c = coupling_step(tw, tl, scn);
        let gain = 1.0 / (1.0 + round as f64).sqrt();
        if scn.n_w > 0 {
            let t = empirical_tau(&scn.wifi, scn.wifi.max_retries, c.pc_w, c.pb_w, opts.fixed_point_slots, &mut rng);
            tw += gain * (t - tw);
        }
        if scn.n_l > 0 {
            let t = empirical_tau(&scn.laa, scn.laa.max_retries, c.pc_l, c.pb_l, opts.fixed_point_slots, &mut rng);
            tl += gain * (t - tl);
        }
        if round >= opts.fixed_point_rounds / 2 {
            sum_w += tw;
            sum_l += tl;
            n_avg += 1;
        }
    }
    let (tw, tl) = (sum_w / n_avg as f64, sum_l / n_avg as f64);
    let c = coupling_step(tw, tl, scn);

    let dur = burst_durations(scn).unwrap();
    let mut wifi: Vec<Chain> = (0..scn.n_w).map(|_| Chain::new(scn.wifi.max_retries)).collect();
    let mut laa: Vec<Chain> = (0..scn.n_l).map(|_| Chain::new(scn.laa.max_retries)).collect();
    let (mut time, mut wifi_ok, mut laa_ok, mut mixed) = (0.0, 0u64, 0u64, 0u64);
    let (mut tx_w, mut tx_l) = (0u64, 0u64);
    for _ in 0..opts.measure_slots {
        let a = wifi.iter_mut().map(|ch| ch.step(&scn.wifi, c.pc_w, c.pb_w, &mut rng)).filter(|t| *t).count();
        let b = laa.iter_mut().map(|ch| ch.step(&scn.laa, c.pc_l, c.pb_l, &mut rng)).filter(|t| *t).count();
        tx_w += a as u64;
        tx_l += b as u64;
        time += match (a, b) {
            (0, 0) => scn.wifi.slot_time,
            (1, 0) => {
                wifi_ok += 1;
                dur.ts_w
            }
            (0, 1) => {
                laa_ok += 1;
                dur.ts_l
            }
            (_, 0) => dur.tc_w,
            (0, _) => dur.tc_l,
            _ => {
                mixed += 1;
                dur.tc_w.max(dur.tc_l)
            }
        };
    }
    let wifi_bits = wifi_ok as f64 * f64::from(dur.mpdus) * f64::from(scn.wifi.payload_bytes) * 8.0;
    let laa_air = laa_ok as f64 * scn.laa.txop + mixed as f64 * surviving_laa_airtime(&dur, scn.laa.laa_slot);
    let slots = opts.measure_slots as f64;
    McEstimate {
        tau_w: if scn.n_w > 0 { tx_w as f64 / (slots * f64::from(scn.n_w)) } else { 0.0 },
        tau_l: if scn.n_l > 0 { tx_l as f64 / (slots * f64::from(scn.n_l)) } else { 0.0 },
        wifi_mbps: wifi_bits / time,
        laa_mbps: LAA_DATA_FRACTION * scn.laa_rate * laa_air / time,
    }
}

/// Independent replications run in parallel, in seed order.
pub fn replications(scn: &CoexScenario, opts: &McOptions, seeds: &[u64]) -> Vec<McEstimate> {
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| s.spawn(move || replicate(scn, opts, seed)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

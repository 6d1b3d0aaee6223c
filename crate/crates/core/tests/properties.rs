mod support;

use dynshare_core::coex::{
    coupling_step, event_probabilities, fixed_point_defect, laa_throughput, wifi_throughput,
    backoff_root_probability, transmission_probability,
};
use dynshare_core::params::{
    ampdu_limit_bytes, contention_window, max_mpdus_per_burst, peak_phy_rate, LaaClassProfile, Rat,
    WifiMacProfile, MAX_AMPDU_EXP,
};
use dynshare_core::share::{
    best_dma, coexistence_capacities, dfm_partition, dtm_capacities, effective_channel_usage,
    packed_window_capacity, windowed_capacity, DtmSchedule, Regime,
};
use dynshare_core::{capacity_no_coex, evaluate, solve_equilibrium, Error};
use proptest::prelude::*;
use support::{scenario, COEX_BANDWIDTHS};

fn class() -> impl Strategy<Value = u8> {
    prop_oneof![Just(1u8), Just(4u8)]
}

fn bandwidth() -> impl Strategy<Value = u32> {
    prop::sample::select(COEX_BANDWIDTHS.to_vec())
}

proptest! {
    #[test]
    fn contention_window_grows_then_clamps(class in class(), stage in 0u32..12) {
        let laa = LaaClassProfile::for_class(class).unwrap();
        let wifi = WifiMacProfile::table2();
        for cw in [contention_window(&laa, stage), contention_window(&wifi, stage)] {
            prop_assert!(cw > 0);
        }
        prop_assert!(contention_window(&laa, stage + 1) >= contention_window(&laa, stage));
        prop_assert!(contention_window(&wifi, stage + 1) >= contention_window(&wifi, stage));
        if contention_window(&wifi, stage) == wifi.cw_max {
            prop_assert_eq!(contention_window(&wifi, stage + 1), wifi.cw_max);
        }
    }

    #[test]
    fn ampdu_limit_monotone(exp in 0u8..MAX_AMPDU_EXP, len in 1u32..20_000) {
        let here = ampdu_limit_bytes(exp, len).unwrap();
        prop_assert!(here < (1 << 20));
        prop_assert!(ampdu_limit_bytes(exp + 1, len).unwrap() >= here);
        prop_assert!(ampdu_limit_bytes(exp, len + 1).unwrap() >= here);
    }

    #[test]
    fn mpdus_per_burst_monotone(rate in 1.0f64..900.0, cap in 0.0f64..6000.0, dr in 0.0f64..100.0, dc in 0.0f64..1000.0) {
        let wifi = WifiMacProfile::table2();
        let n = max_mpdus_per_burst(&wifi, rate, cap);
        prop_assert!(n <= 64);
        prop_assert!(max_mpdus_per_burst(&wifi, rate + dr, cap) >= n);
        prop_assert!(max_mpdus_per_burst(&wifi, rate, cap + dc) >= n);
    }

    #[test]
    fn equilibrium_is_consistent(bw in bandwidth(), class in class(), n_w in 0u32..=4, n_l in 0u32..=4) {
        prop_assume!(n_w + n_l > 0);
        let scn = scenario(bw, class).with_nodes(n_w, n_l);
        let eq = solve_equilibrium(&scn).unwrap();
        prop_assert!(fixed_point_defect(&eq, &scn).unwrap() <= 1e-10);
        let c = coupling_step(eq.tau_w, eq.tau_l, &scn);
        prop_assert!((c.pc_w - eq.pc_w).abs() <= 1e-12 && (c.pb_l - eq.pb_l).abs() <= 1e-12);
        if n_w > 0 {
            let b00 = backoff_root_probability(&scn.wifi, eq.pc_w, eq.pb_w).unwrap();
            let tau = transmission_probability(b00, eq.pc_w, scn.wifi.max_retries);
            prop_assert!((tau - eq.tau_w).abs() <= 2e-10);
        }
        let p = event_probabilities(&eq, &scn);
        prop_assert!((p.total() - 1.0).abs() <= 1e-9);
        for v in [p.p_idle, p.ps_w, p.ps_l, p.pc_ww, p.pc_ll, p.pc_wl] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn more_contenders_never_help(bw in bandwidth(), class in class(), n_w in 1u32..=4, n_l in 1u32..=3) {
        let base = scenario(bw, class);
        let eq = |nw, nl| {
            let s = base.clone().with_nodes(nw, nl);
            let e = solve_equilibrium(&s).unwrap();
            (wifi_throughput(&e, &s).unwrap(), laa_throughput(&e, &s).unwrap())
        };
        let (w, l) = eq(n_w, n_l);
        prop_assert!(eq(n_w, n_l + 1).0 <= w * (1.0 + 1e-12));
        prop_assert!(eq(n_w.min(3) + 1, n_l).1 <= eq(n_w.min(3), n_l).1 * (1.0 + 1e-12));
        prop_assert!(l >= 0.0);
    }

    #[test]
    fn coexistence_below_isolation(bw in bandwidth(), class in class(), n_w in 1u32..=4, n_l in 1u32..=4) {
        let scn = scenario(bw, class).with_nodes(n_w, n_l);
        let out = evaluate(&scn).unwrap();
        let nc_w = capacity_no_coex(Rat::WiFi, &scn, f64::INFINITY).unwrap().mbps;
        let nc_l = capacity_no_coex(Rat::Laa, &scn, f64::INFINITY).unwrap().mbps;
        prop_assert!(out.wifi_mbps <= nc_w);
        prop_assert!(out.laa_mbps <= nc_l);
    }

    #[test]
    fn dtm_share_identity(bw in bandwidth(), class in class(), tw in 0.0f64..60_000.0, tl in 0.0f64..90_000.0) {
        prop_assume!(tw + tl > 1.0);
        let scn = scenario(bw, class);
        let s = DtmSchedule::new(tw, tl, scn.wifi.basic_rate).unwrap();
        let rep = dtm_capacities(&s, &scn).unwrap();
        let total = tw + tl + s.t_downtime;
        let cw = windowed_capacity(Rat::WiFi, tw, &scn).unwrap();
        let cl = windowed_capacity(Rat::Laa, tl, &scn).unwrap();
        if cw > 0.0 {
            prop_assert!((rep.c_w / cw - tw / total).abs() <= 1e-12);
        }
        if cl > 0.0 {
            prop_assert!((rep.c_l / cl - tl / total).abs() <= 1e-12);
        }
    }

    #[test]
    fn usage_increases_and_stays_in_unit_interval(a in 1.0f64..1e6, d in 1e-3f64..1e5) {
        let u = effective_channel_usage(a, 60.0).unwrap();
        let v = effective_channel_usage(a + d, 60.0).unwrap();
        prop_assert!(u > 0.0 && v < 1.0 && v > u);
    }

    #[test]
    fn dfm_conserves_bandwidth(bw in prop::sample::select(vec![20u32, 40, 80, 160]), ratio in 0.0f64..=1.0) {
        match dfm_partition(bw, ratio) {
            Ok(p) => {
                prop_assert_eq!(p.wifi_bandwidth() + 20 * p.laa_carriers, bw);
                prop_assert!(p.wifi_subchannels.windows(2).all(|w| w[0] >= w[1]));
            }
            Err(Error::InfeasiblePartition { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn best_approach_ignores_common_scale(bw in prop::sample::select(vec![40u32, 80, 160]), ratio in 0.05f64..0.95, alpha in 0.0f64..=1.0, k in 0.01f64..100.0) {
        let scn = scenario(bw, 1);
        let rec = best_dma(bw, ratio, alpha, &scn).unwrap();
        if let Some(dfm) = &rec.dfm {
            let pick = |dtm: f64, dfm: f64| if dtm > dfm { Regime::Dtm } else { Regime::Dfm };
            let agg = |c_w: f64, c_l: f64| alpha * c_w + (1.0 - alpha) * c_l;
            let plain = pick(agg(rec.dtm.c_w, rec.dtm.c_l), agg(dfm.c_w, dfm.c_l));
            let scaled = pick(agg(k * rec.dtm.c_w, k * rec.dtm.c_l), agg(k * dfm.c_w, k * dfm.c_l));
            prop_assert_eq!(plain, scaled);
            if !rec.tie {
                prop_assert_eq!(plain, rec.choice);
            }
        } else {
            prop_assert!(rec.dfm_infeasible);
            prop_assert_eq!(rec.choice, Regime::Dtm);
        }
    }

    #[test]
    fn packing_matches_sequential_layout(window in 1.0f64..80_000.0, txop in 10.0f64..12_000.0, t_cax in 1.0f64..900.0, a in 1.0f64..900.0, b in 1.0f64..3000.0) {
        let rate = |x: f64| a * x / (x + b);
        let got = packed_window_capacity(window, txop, t_cax, |x| Ok(rate(x))).unwrap();
        let want = support::packer::pack(window, txop, t_cax, rate);
        let err = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
        prop_assert!(err <= 1e-9, "{got} vs {want}");
    }
}

#[test]
fn rates_increase_with_bandwidth() {
    for rat in [Rat::WiFi, Rat::Laa] {
        let mut last = 0.0;
        for bw in [20, 40, 60, 80, 100, 160] {
            if let Ok(r) = peak_phy_rate(rat, bw) {
                assert!(r > last, "{rat} {bw}");
                last = r;
            }
        }
    }
}

#[test]
fn single_rat_reduces_to_isolation() {
    for bw in COEX_BANDWIDTHS {
        for class in [1, 4] {
            let scn = scenario(bw, class);
            let wifi_only = scn.clone().with_nodes(1, 0);
            let nc = capacity_no_coex(Rat::WiFi, &scn, f64::INFINITY).unwrap().mbps;
            assert!((evaluate(&wifi_only).unwrap().wifi_mbps - nc).abs() <= 1e-9 * nc);
            let eq = solve_equilibrium(&wifi_only).unwrap();
            assert_eq!(eq.pc_w, 0.0);
        }
    }
}

#[test]
fn coexistence_report_sums() {
    let scn = scenario(80, 4);
    let rep = coexistence_capacities(&scn).unwrap();
    assert!((rep.aggregated - (rep.c_w + rep.c_l)).abs() < 1e-9);
}

//! Reproduction tables and sweep grids, written as CSV or JSON.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coex::{capacity_no_coex, CoexScenario};
use crate::error::{Error, Result};
use crate::params::{LaaClassProfile, PhyRateTable, Rat};
use crate::share::{
    best_dma, coexistence_capacities, cts_downtime, dfm_capacities, dfm_partition,
    dtm_capacities, effective_channel_usage, windowing_efficiency, CapacityReport,
    DtmSchedule, Regime, DEFAULT_ALPHA, DEFAULT_DTM_PERIOD_US,
};
use crate::sim::{run_simulation, SimConfig};

pub const TABLE_IDS: [u32; 6] = [1, 6, 7, 8, 9, 10];
pub const WIFI_BANDWIDTHS: [u32; 4] = [20, 40, 80, 160];
pub const SHARED_BANDWIDTHS: [u32; 3] = [40, 80, 160];
pub const RATIOS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(#[serde(serialize_with = "round_for_json")] Num),
    Flag(bool),
    Empty(()),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num {
    pub value: f64,
    pub decimals: usize,
}

fn round_for_json<S: serde::Serializer>(n: &Num, s: S) -> std::result::Result<S::Ok, S::Error> {
    let text = format!("{:.*}", n.decimals, n.value);
    s.serialize_f64(text.parse().unwrap_or(n.value))
}

impl Cell {
    pub fn num(value: f64, decimals: usize) -> Self {
        Cell::Num(Num { value, decimals })
    }

    pub fn mbps(value: f64) -> Self {
        Cell::num(value, 2)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(n) => Some(n.value),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(n) => format!("{:.*}", n.decimals, n.value),
            Cell::Flag(b) => b.to_string(),
            Cell::Empty(()) => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            comments: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn value(&self, row: usize, column: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(column)?)
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}").map_err(io_error)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_error)?;
        }
        w.flush().map_err(io_error)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let records: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or_default()))
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({ "comments": self.comments, "records": records });
        serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Config(e.to_string()))?;
        writeln!(out).map_err(io_error)
    }

    pub fn to_string(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf, format)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

fn ratio_label(ratio: f64) -> String {
    format!("{}%", (ratio * 100.0).round())
}

pub fn table1() -> Table {
    let rates = PhyRateTable::default();
    let mut t = Table::new(["bandwidth_mhz", "wifi_mbps", "laa_mbps"]);
    for bw in [20, 40, 60, 80, 100, 160] {
        let cell = |map: &std::collections::BTreeMap<u32, f64>| {
            map.get(&bw).map_or(Cell::Empty(()), |r| Cell::num(*r, 1))
        };
        t.push(vec![Cell::Int(bw.into()), cell(&rates.wifi), cell(&rates.laa)]);
    }
    t
}

/// No-coexistence Wi-Fi capacity on every Wi-Fi bandwidth.
pub fn wifi_nc_table(payload: u32) -> Result<Table> {
    let mut t = Table::new(WIFI_BANDWIDTHS.iter().map(|bw| format!("c_w_{bw}mhz_mbps")));
    let mut row = Vec::new();
    for bw in WIFI_BANDWIDTHS {
        let scn = CoexScenario::isolated(Rat::WiFi, bw, LaaClassProfile::class1())?.with_payload(payload);
        row.push(Cell::mbps(capacity_no_coex(Rat::WiFi, &scn, f64::INFINITY)?.mbps));
    }
    t.push(row);
    t.comments.push(format!("payload_bytes={payload}"));
    Ok(t)
}

/// One row of the approach comparison grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachRow {
    pub bandwidth_mhz: u32,
    pub wifi_ratio: f64,
    pub class1: crate::share::DmaRecommendation,
    pub class4: crate::share::DmaRecommendation,
}

impl ApproachRow {
    pub fn best_c_w(&self) -> f64 {
        self.class1.chosen().c_w
    }
}

pub fn approach_grid(payload: u32, period: f64) -> Result<Vec<ApproachRow>> {
    let mut rows = Vec::new();
    for bw in SHARED_BANDWIDTHS {
        for ratio in RATIOS {
            let rec = |class: u8| -> Result<_> {
                let scn = CoexScenario::new(bw, LaaClassProfile::for_class(class)?)?.with_payload(payload);
                crate::share::best_dma_with_period(bw, ratio, DEFAULT_ALPHA, period, &scn)
            };
            rows.push(ApproachRow {
                bandwidth_mhz: bw,
                wifi_ratio: ratio,
                class1: rec(1)?,
                class4: rec(4)?,
            });
        }
    }
    Ok(rows)
}

pub fn table8() -> Result<Table> {
    let mut t = Table::new([
        "bandwidth_mhz",
        "wifi_ratio",
        "c_w_mbps",
        "c_l_class1_mbps",
        "c_l_class4_mbps",
        "best_dma",
        "best_dma_class4",
        "dtm_c_w_mbps",
        "dtm_c_l_class1_mbps",
        "dtm_c_l_class4_mbps",
        "dfm_c_w_mbps",
        "dfm_c_l_class1_mbps",
        "dfm_c_l_class4_mbps",
        "dfm_feasible",
    ]);
    t.comments.push(format!(
        "t_wifi + t_laa = {DEFAULT_DTM_PERIOD_US} us; payload_bytes=1500; c_* under the class 1 best approach"
    ));
    for row in approach_grid(1500, DEFAULT_DTM_PERIOD_US)? {
        let dfm = |r: &crate::share::DmaRecommendation, f: fn(&CapacityReport) -> f64| {
            r.dfm.as_ref().map_or(Cell::Empty(()), |d| Cell::mbps(f(d)))
        };
        t.push(vec![
            Cell::Int(row.bandwidth_mhz.into()),
            Cell::text(ratio_label(row.wifi_ratio)),
            Cell::mbps(row.best_c_w()),
            Cell::mbps(row.class1.chosen().c_l),
            Cell::mbps(row.class4.chosen().c_l),
            Cell::text(row.class1.choice.to_string()),
            Cell::text(row.class4.choice.to_string()),
            Cell::mbps(row.class1.dtm.c_w),
            Cell::mbps(row.class1.dtm.c_l),
            Cell::mbps(row.class4.dtm.c_l),
            dfm(&row.class1, |d| d.c_w),
            dfm(&row.class1, |d| d.c_l),
            dfm(&row.class4, |d| d.c_l),
            Cell::Flag(!row.class1.dfm_infeasible),
        ]);
    }
    Ok(t)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn seeds_comment(seeds: &[u64]) -> String {
    let list: Vec<String> = seeds.iter().map(u64::to_string).collect();
    format!("simulation rows: mean over seeds {}", list.join(","))
}

/// Mean simulated Wi-Fi throughput over `seeds`.
pub fn simulate_mean(base: &SimConfig, seeds: &[u64]) -> Result<f64> {
    let mut values = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = SimConfig {
            seed,
            ..base.clone()
        };
        values.push(run_simulation(&cfg)?.wifi_throughput);
    }
    Ok(mean(&values))
}

pub fn table9(seeds: &[u64]) -> Result<Table> {
    let mut t = Table::new(
        std::iter::once("row".to_owned()).chain(WIFI_BANDWIDTHS.iter().map(|bw| format!("c_w_{bw}mhz_mbps"))),
    );
    t.comments.push(seeds_comment(seeds));
    let analytical = wifi_nc_table(1500)?;
    let mut row = vec![Cell::text("analytical")];
    row.extend(analytical.rows[0].iter().cloned());
    t.push(row);
    let mut row = vec![Cell::text("simulation")];
    for bw in WIFI_BANDWIDTHS {
        row.push(Cell::mbps(simulate_mean(&SimConfig::dfm(bw, 0), seeds)?));
    }
    t.push(row);
    Ok(t)
}

pub const TABLE10_WIFI_WINDOW_US: f64 = 5_000.0;

pub fn table10(seeds: &[u64]) -> Result<Table> {
    let mut t = Table::new(
        ["row".to_owned(), "bandwidth_mhz".to_owned()]
            .into_iter()
            .chain(RATIOS.iter().map(|r| format!("c_w_{}pct_mbps", (r * 100.0).round()))),
    );
    t.comments.push(format!("t_wifi = {TABLE10_WIFI_WINDOW_US} us"));
    t.comments.push(seeds_comment(seeds));
    for bw in WIFI_BANDWIDTHS {
        let scn = CoexScenario::new(bw, LaaClassProfile::class1())?;
        let mut analytical = vec![Cell::text("analytical"), Cell::Int(bw.into())];
        let mut simulated = vec![Cell::text("simulation"), Cell::Int(bw.into())];
        for ratio in RATIOS {
            let s = DtmSchedule::with_wifi_window(TABLE10_WIFI_WINDOW_US, ratio, scn.wifi.basic_rate)?;
            analytical.push(Cell::mbps(dtm_capacities(&s, &scn)?.c_w));
            let cfg = SimConfig::dtm(bw, s.t_wifi, s.t_laa, 0);
            simulated.push(Cell::mbps(simulate_mean(&cfg, seeds)?));
        }
        t.push(analytical);
        t.push(simulated);
    }
    Ok(t)
}

pub fn table(id: u32, seeds: &[u64]) -> Result<Table> {
    match id {
        1 => Ok(table1()),
        6 => wifi_nc_table(1500),
        7 => wifi_nc_table(15_000),
        8 => table8(),
        9 => table9(seeds),
        10 => table10(seeds),
        other => Err(Error::UnsupportedTable(other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Per-RAT capacities under each regime.
    #[default]
    Capacity,
    /// Effective channel usage against combined window length.
    Usage,
    /// Windowed over ideal DTM capacity against window length.
    Windowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepRegime {
    Coex,
    Dtm,
    Dfm,
    Nc,
}

impl SweepRegime {
    pub fn key(self) -> &'static str {
        match self {
            SweepRegime::Coex => "coex",
            SweepRegime::Dtm => "dtm",
            SweepRegime::Dfm => "dfm",
            SweepRegime::Nc => "nc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub bandwidths: Vec<u32>,
    pub ratios: Vec<f64>,
    pub classes: Vec<u8>,
    pub payloads: Vec<u32>,
    pub regimes: Vec<SweepRegime>,
    pub dtm_period_us: f64,
    /// Fixed Wi-Fi window; the LAA window follows from the ratio.
    pub t_wifi_us: Option<f64>,
    pub windows_us: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            kind: SweepKind::Capacity,
            bandwidths: vec![80],
            ratios: RATIOS.to_vec(),
            classes: vec![1, 4],
            payloads: vec![1500],
            regimes: vec![SweepRegime::Coex, SweepRegime::Dtm, SweepRegime::Dfm],
            dtm_period_us: DEFAULT_DTM_PERIOD_US,
            t_wifi_us: None,
            windows_us: default_windows(),
        }
    }
}

fn default_windows() -> Vec<f64> {
    let mut w: Vec<f64> = (1..=40).map(|i| f64::from(i) * 500.0).collect();
    w.push(5940.0);
    w.sort_by(f64::total_cmp);
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    Capacity {
        bandwidth_mhz: u32,
        ratio: f64,
        class: u8,
        payload: u32,
        regime: SweepRegime,
    },
    Usage {
        window_us: f64,
    },
    Windowing {
        bandwidth_mhz: u32,
        class: u8,
        rat: Rat,
        window_us: f64,
    },
}

impl SweepSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Grid behind a figure of the evaluation.
    pub fn figure(n: u32) -> Result<Self> {
        let capacity = |bw: u32, payload: u32| SweepSpec {
            bandwidths: vec![bw],
            payloads: vec![payload],
            ..SweepSpec::default()
        };
        Ok(match n {
            5 => SweepSpec {
                kind: SweepKind::Usage,
                ..SweepSpec::default()
            },
            6 => capacity(80, 1500),
            7 => SweepSpec {
                kind: SweepKind::Windowing,
                ..SweepSpec::default()
            },
            8 => capacity(160, 1500),
            9 => capacity(40, 1500),
            10 => capacity(80, 15_000),
            11 => capacity(160, 15_000),
            other => return Err(Error::invalid("figure", format!("no grid for figure {other}"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |name: &'static str, len: usize| {
            if len == 0 {
                Err(Error::invalid(name, "axis is empty"))
            } else {
                Ok(())
            }
        };
        match self.kind {
            SweepKind::Usage => empty("windows_us", self.windows_us.len())?,
            SweepKind::Windowing => {
                empty("bandwidths", self.bandwidths.len())?;
                empty("classes", self.classes.len())?;
                empty("windows_us", self.windows_us.len())?;
            }
            SweepKind::Capacity => {
                empty("bandwidths", self.bandwidths.len())?;
                empty("ratios", self.ratios.len())?;
                empty("classes", self.classes.len())?;
                empty("payloads", self.payloads.len())?;
                empty("regimes", self.regimes.len())?;
            }
        }
        for c in &self.classes {
            LaaClassProfile::for_class(*c)?;
        }
        for r in &self.ratios {
            if !(0.0..=1.0).contains(r) {
                return Err(Error::invalid("ratios", format!("{r} outside [0, 1]")));
            }
        }
        if !(self.dtm_period_us > 0.0) {
            return Err(Error::invalid("dtm_period_us", "must be positive"));
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<&'static str> {
        match self.kind {
            SweepKind::Capacity => vec![
                "bandwidth_mhz",
                "wifi_ratio",
                "class",
                "payload_bytes",
                "regime",
                "c_w_mbps",
                "c_l_mbps",
                "aggregate_mbps",
                "feasible",
            ],
            SweepKind::Usage => vec!["combined_window_us", "effective_usage"],
            SweepKind::Windowing => vec!["bandwidth_mhz", "class", "rat", "window_us", "efficiency"],
        }
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let mut points = Vec::new();
        match self.kind {
            SweepKind::Usage => {
                points.extend(self.windows_us.iter().map(|&window_us| SweepPoint::Usage { window_us }));
            }
            SweepKind::Windowing => {
                for &bandwidth_mhz in &self.bandwidths {
                    for &class in &self.classes {
                        for rat in [Rat::WiFi, Rat::Laa] {
                            for &window_us in &self.windows_us {
                                points.push(SweepPoint::Windowing {
                                    bandwidth_mhz,
                                    class,
                                    rat,
                                    window_us,
                                });
                            }
                        }
                    }
                }
            }
            SweepKind::Capacity => {
                for &bandwidth_mhz in &self.bandwidths {
                    for &payload in &self.payloads {
                        for &class in &self.classes {
                            for &ratio in &self.ratios {
                                for &regime in &self.regimes {
                                    points.push(SweepPoint::Capacity {
                                        bandwidth_mhz,
                                        ratio,
                                        class,
                                        payload,
                                        regime,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        points
    }

    /// Evaluates one grid point. Infeasible configurations yield a row with
    /// `feasible = false` rather than an error.
    pub fn evaluate(&self, point: &SweepPoint) -> Result<Vec<Cell>> {
        match *point {
            SweepPoint::Usage { window_us } => {
                let usage = effective_channel_usage(window_us, cts_downtime(6.0)?)?;
                Ok(vec![Cell::num(window_us, 2), Cell::num(usage, 6)])
            }
            SweepPoint::Windowing {
                bandwidth_mhz,
                class,
                rat,
                window_us,
            } => {
                let scn = CoexScenario::new(bandwidth_mhz, LaaClassProfile::for_class(class)?)?;
                let schedule = match rat {
                    Rat::WiFi => DtmSchedule::new(window_us, 0.0, scn.wifi.basic_rate)?,
                    Rat::Laa => DtmSchedule::new(0.0, window_us, scn.wifi.basic_rate)?,
                };
                Ok(vec![
                    Cell::Int(bandwidth_mhz.into()),
                    Cell::Int(class.into()),
                    Cell::text(match rat {
                        Rat::WiFi => "wifi",
                        Rat::Laa => "laa",
                    }),
                    Cell::num(window_us, 2),
                    Cell::num(windowing_efficiency(rat, &schedule, &scn)?, 6),
                ])
            }
            SweepPoint::Capacity {
                bandwidth_mhz,
                ratio,
                class,
                payload,
                regime,
            } => {
                let scn = CoexScenario::new(bandwidth_mhz, LaaClassProfile::for_class(class)?)?
                    .with_payload(payload);
                let report = self.capacity(regime, ratio, &scn)?;
                let head = vec![
                    Cell::Int(bandwidth_mhz.into()),
                    Cell::num(ratio, 4),
                    Cell::Int(class.into()),
                    Cell::Int(payload.into()),
                ];
                let tail = match report {
                    Some(r) => vec![
                        Cell::text(regime.key()),
                        Cell::mbps(r.c_w),
                        Cell::mbps(r.c_l),
                        Cell::mbps(r.aggregated),
                        Cell::Flag(true),
                    ],
                    None => vec![
                        Cell::text(regime.key()),
                        Cell::Empty(()),
                        Cell::Empty(()),
                        Cell::Empty(()),
                        Cell::Flag(false),
                    ],
                };
                Ok(head.into_iter().chain(tail).collect())
            }
        }
    }

    fn capacity(&self, regime: SweepRegime, ratio: f64, scn: &CoexScenario) -> Result<Option<CapacityReport>> {
        let bw = scn.bandwidth_mhz;
        Ok(Some(match regime {
            SweepRegime::Coex => coexistence_capacities(scn)?,
            SweepRegime::Dtm => {
                let schedule = match self.t_wifi_us {
                    Some(t) => DtmSchedule::with_wifi_window(t, ratio, scn.wifi.basic_rate)?,
                    None => DtmSchedule::from_ratio(self.dtm_period_us, ratio, scn.wifi.basic_rate)?,
                };
                dtm_capacities(&schedule, scn)?
            }
            SweepRegime::Dfm => match dfm_partition(bw, ratio) {
                Ok(p) => dfm_capacities(&p, scn)?,
                Err(Error::InfeasiblePartition { .. }) => return Ok(None),
                Err(e) => return Err(e),
            },
            SweepRegime::Nc => {
                let c_w = capacity_no_coex(Rat::WiFi, scn, f64::INFINITY)?.mbps;
                let c_l = capacity_no_coex(Rat::Laa, scn, f64::INFINITY)?.mbps;
                CapacityReport::new(Regime::NoCoex, c_w, c_l, scn, ratio)
            }
        }))
    }

    /// Sequential evaluation of the whole grid.
    pub fn run(&self) -> Result<Table> {
        self.validate()?;
        let rows = self
            .points()
            .iter()
            .map(|p| self.evaluate(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.table_from_rows(rows))
    }

    pub fn table_from_rows(&self, rows: Vec<Vec<Cell>>) -> Table {
        let mut t = Table::new(self.columns());
        t.rows = rows;
        t
    }
}

/// Convenience wrapper used by the `optimize` command.
pub fn optimize_table(bw: u32, ratio: f64, alpha: f64, class: u8, payload: u32) -> Result<Table> {
    let scn = CoexScenario::new(bw, LaaClassProfile::for_class(class)?)?.with_payload(payload);
    let rec = best_dma(bw, ratio, alpha, &scn)?;
    let mut t = Table::new(["approach", "c_w_mbps", "c_l_mbps", "aggregate_mbps", "chosen", "tie"]);
    let mut push = |r: &CapacityReport| {
        t.push(vec![
            Cell::text(r.regime.to_string()),
            Cell::mbps(r.c_w),
            Cell::mbps(r.c_l),
            Cell::mbps(r.aggregated),
            Cell::Flag(r.regime == rec.choice),
            Cell::Flag(rec.tie),
        ]);
    };
    push(&rec.dtm);
    if let Some(dfm) = &rec.dfm {
        push(dfm);
    }
    t.comments.push(format!(
        "bandwidth_mhz={bw} wifi_ratio={ratio} alpha={alpha} class={class} payload_bytes={payload}"
    ));
    if rec.dfm_infeasible {
        t.comments.push("DFM infeasible for this split; DTM chosen by default".into());
    }
    Ok(t)
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynshare_core::config::{ParamSet, PRESETS};
use dynshare_core::report::{self, Cell, Format, SweepRegime, SweepSpec, Table};
use dynshare_core::sim::{self, SimConfig, SimMode, DEFAULT_SEED};
use dynshare_core::Error;
use rayon::prelude::*;

/// Reproduction tables, sweeps and simulations for coordinated Wi-Fi/LAA
/// spectrum sharing.
#[derive(Debug, Parser)]
#[command(name = "dynshare", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv, global = true)]
    format: OutFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Dfm,
    Dtm,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regenerate one of the reference tables (1, 6, 7, 8, 9, 10).
    Table {
        id: u32,
        /// First simulation seed; tables 9 and 10 average `--runs` seeds from here.
        #[arg(long, env = "DYNSHARE_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5)]
        runs: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a capacity, usage or windowing grid.
    Sweep {
        /// Grid behind a figure (5 to 11).
        #[arg(long, conflicts_with = "config")]
        figure: Option<u32>,
        /// Sweep spec in TOML.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        bandwidth: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        ratio: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        class: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        payload: Vec<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the MAC simulator for one scenario.
    Simulate {
        /// Simulation config in TOML; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        bandwidth: Option<u32>,
        #[arg(long = "t-wifi")]
        t_wifi: Option<f64>,
        #[arg(long = "t-laa")]
        t_laa: Option<f64>,
        /// Wi-Fi share of a 10 ms DTM period, instead of --t-wifi/--t-laa.
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        class: Option<u8>,
        #[arg(long)]
        payload: Option<u32>,
        #[arg(long, env = "DYNSHARE_SEED")]
        seed: Option<u64>,
        /// Write the frame trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Pick DTM or DFM for a channel split.
    Optimize {
        #[arg(long)]
        bandwidth: u32,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = dynshare_core::share::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        class: u8,
        #[arg(long, default_value_t = 1500)]
        payload: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Print a parameter preset as TOML.
    Params {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        preset: String,
    },
}

#[derive(Debug)]
enum CliError {
    Model(Error),
    Io(PathBuf, io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn emit(table: &Table, output: &Output) -> Result<(), CliError> {
    let text = table.to_string(output.format.into())?;
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("<stdout>".into(), e)),
    }
}

fn seeds(first: u64, runs: u64) -> Vec<u64> {
    (0..runs.max(1)).map(|i| first.wrapping_add(i)).collect()
}

fn sweep_table(spec: &SweepSpec) -> Result<Table, CliError> {
    spec.validate()?;
    let rows = spec
        .points()
        .par_iter()
        .map(|p| spec.evaluate(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(spec.table_from_rows(rows))
}

fn sim_table(cfg: &SimConfig, r: &sim::SimResult, seed_from_default: bool) -> Table {
    let mut t = Table::new([
        "mode",
        "bandwidth_mhz",
        "laa_class",
        "payload_bytes",
        "t_wifi_us",
        "t_laa_us",
        "wifi_throughput_mbps",
        "laa_throughput_mbps",
        "data_bursts",
        "mpdus_delivered",
        "beacons",
        "cts_frames",
        "window_overruns",
        "nav_time_us",
        "wifi_window_time_us",
        "measure_us",
    ]);
    t.comments.push(format!(
        "seed={}{}",
        r.seed,
        if seed_from_default { " (default)" } else { "" }
    ));
    let opt = |v: Option<f64>| v.map_or(Cell::Empty(()), |x| Cell::num(x, 3));
    let int = |v: u64| Cell::Int(v as i64);
    t.push(vec![
        Cell::text(match r.mode {
            SimMode::Dfm => "dfm",
            SimMode::Dtm => "dtm",
        }),
        Cell::Int(r.bandwidth_mhz.into()),
        Cell::Int(cfg.laa_class.into()),
        Cell::Int(cfg.payload_bytes.into()),
        opt(cfg.t_wifi_us.filter(|_| r.mode == SimMode::Dtm)),
        opt(cfg.t_laa_us.filter(|_| r.mode == SimMode::Dtm)),
        Cell::num(r.wifi_throughput, 3),
        Cell::num(r.laa_airtime_throughput, 3),
        int(r.counts.data_bursts),
        int(r.counts.mpdus_delivered),
        int(r.counts.beacons),
        int(r.counts.cts_frames),
        int(r.counts.window_overruns),
        Cell::num(r.nav_time_us, 3),
        Cell::num(r.wifi_window_time_us, 3),
        Cell::num(r.measure_us, 3),
    ]);
    t
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Table { id, seed, runs, output } => {
            let table = report::table(id, &seeds(seed.unwrap_or(DEFAULT_SEED), runs))?;
            emit(&table, &output)
        }
        Command::Sweep {
            figure,
            config,
            bandwidth,
            ratio,
            class,
            payload,
            output,
        } => {
            let mut spec = match (figure, config) {
                (Some(n), _) => SweepSpec::figure(n)?,
                (None, Some(path)) => SweepSpec::from_toml(&read(&path)?)?,
                (None, None) => SweepSpec::default(),
            };
            if !bandwidth.is_empty() {
                spec.bandwidths = bandwidth;
            }
            if !ratio.is_empty() {
                spec.ratios = ratio;
            }
            if !class.is_empty() {
                spec.classes = class;
            }
            if !payload.is_empty() {
                spec.payloads = payload;
            }
            if spec.regimes.is_empty() {
                spec.regimes = vec![SweepRegime::Coex, SweepRegime::Dtm, SweepRegime::Dfm];
            }
            emit(&sweep_table(&spec)?, &output)
        }
        Command::Simulate {
            config,
            mode,
            bandwidth,
            t_wifi,
            t_laa,
            ratio,
            class,
            payload,
            seed,
            trace,
            output,
        } => {
            let mut cfg = match &config {
                Some(path) => SimConfig::from_toml(&read(path)?)?,
                None => SimConfig::default(),
            };
            let seed_from_default = seed.is_none() && (config.is_none() || cfg.seed == DEFAULT_SEED);
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = mode {
                cfg.mode = match m {
                    Mode::Dfm => SimMode::Dfm,
                    Mode::Dtm => SimMode::Dtm,
                };
            }
            if let Some(bw) = bandwidth {
                cfg.bandwidth_mhz = bw;
            }
            if let Some(r) = ratio {
                if t_wifi.is_some() || t_laa.is_some() {
                    return Err(CliError::Usage("--ratio excludes --t-wifi/--t-laa".into()));
                }
                let s = dynshare_core::DtmSchedule::from_ratio(
                    dynshare_core::share::DEFAULT_DTM_PERIOD_US,
                    r,
                    cfg.wifi.basic_rate,
                )?;
                cfg.mode = SimMode::Dtm;
                cfg.t_wifi_us = Some(s.t_wifi);
                cfg.t_laa_us = Some(s.t_laa);
            }
            if t_wifi.is_some() {
                cfg.t_wifi_us = t_wifi;
            }
            if t_laa.is_some() {
                cfg.t_laa_us = t_laa;
            }
            if let Some(c) = class {
                cfg.laa_class = c;
            }
            if let Some(p) = payload {
                cfg.payload_bytes = p;
            }
            cfg.trace = trace.is_some();
            let result = sim::run_simulation(&cfg)?;
            if let (Some(path), Some(records)) = (&trace, &result.trace) {
                let file = fs::File::create(path).map_err(|e| CliError::Io(path.clone(), e))?;
                sim::write_trace(io::BufWriter::new(file), records).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            emit(&sim_table(&cfg, &result, seed_from_default), &output)
        }
        Command::Optimize {
            bandwidth,
            ratio,
            alpha,
            class,
            payload,
            output,
        } => emit(&report::optimize_table(bandwidth, ratio, alpha, class, payload)?, &output),
        Command::Params { preset } => {
            let text = ParamSet::preset(&preset)?.to_toml()?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dynshare: {e}");
            ExitCode::FAILURE
        }
    }
}

//! Capacity models and a MAC simulator for Wi-Fi and LAA sharing unlicensed
//! spectrum by contention, time multiplexing or frequency multiplexing.

// `!(x > 0.0)` is deliberate: it rejects NaN too. The other two suggest
// APIs newer than the declared rust-version.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::manual_is_multiple_of,
    clippy::unnecessary_map_or
)]

pub mod coex;
pub mod config;
pub mod error;
pub mod params;
pub mod report;
pub mod share;
pub mod sim;

pub use coex::{
    capacity_no_coex, evaluate, solve_equilibrium, BurstDurations, CoexOutcome, CoexScenario,
    Equilibrium, EventProbs, NcCapacity, SolverOptions,
};
pub use config::ParamSet;
pub use error::{Error, Result};
pub use params::{
    peak_phy_rate, BurstAccounting, LaaClassProfile, PhyRateTable, Rat, WifiMacProfile,
};
pub use share::{
    best_dma, dfm_partition, dtm_capacities, CapacityReport, DfmPartition, DmaRecommendation,
    DtmSchedule, Regime,
};
pub use sim::{run_dfm_simulation, run_dtm_simulation, SimConfig, SimMode, SimResult};

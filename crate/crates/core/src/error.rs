use thiserror::Error;

use crate::params::Rat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported {rat} bandwidth: {mhz} MHz")]
    UnsupportedBandwidth { rat: Rat, mhz: u32 },

    #[error("LAA bandwidth must be a positive multiple of 20 MHz, got {0} MHz")]
    NotCarrierMultiple(u32),

    #[error("A-MPDU length exponent {0} outside 0..=7")]
    AmpduExponent(u8),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Wi-Fi burst carries no MPDUs")]
    EmptyBurst,

    #[error("data rate must be positive")]
    ZeroRate,

    #[error("blocking probability of 1 stalls the backoff chain")]
    DegenerateBlocking,

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("window of {window_us} µs is below the minimum of {min_us} µs")]
    WindowBelowMinimum { window_us: f64, min_us: f64 },

    #[error("{0} µs is not a valid partial subframe length")]
    InvalidPartialSubframe(f64),

    #[error("window length must be positive, got {0} µs")]
    NonPositiveWindow(f64),

    #[error("cannot split {bandwidth_mhz} MHz with {ratio} for Wi-Fi into standard channels")]
    InfeasiblePartition { bandwidth_mhz: u32, ratio: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("unsupported table {0}")]
    UnsupportedTable(u32),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

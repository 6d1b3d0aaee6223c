#![allow(dead_code)]

pub mod montecarlo;
pub mod packer;

use dynshare_core::{CoexScenario, LaaClassProfile};

/// Bandwidths on which both RATs have a rate.
pub const COEX_BANDWIDTHS: [u32; 4] = [20, 40, 80, 160];

pub fn scenario(bw: u32, class: u8) -> CoexScenario {
    CoexScenario::new(bw, LaaClassProfile::for_class(class).unwrap()).unwrap()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

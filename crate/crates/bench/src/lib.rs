//! Shared fixtures for the benchmarks.

use telewig_core::conditional::DiskRegion;
use telewig_core::phase_space::r_from_db;

/// Squeezing parameters spanning the plotted range, -15 dB to -1 dB.
pub fn squeeze_grid() -> Vec<f64> {
    (1..=15).map(|k| r_from_db(-(k as f64))).collect()
}

pub fn disk() -> DiskRegion {
    DiskRegion::new(0.3).expect("positive radius")
}

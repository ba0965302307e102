//! Fixtures shared by the criterion benches.

use qnoise_core::consts::C;
use qnoise_core::{FrequencyGrid, InterferometerConfig};

/// 40 kg mirrors, 4 km arms, 450 Hz bandwidth, arm power fitted to `f_SQL = 30 Hz`.
pub fn ligo_like() -> InterferometerConfig {
    InterferometerConfig::with_sql_frequency(40.0, 4000.0, C / 1064e-9, 450.0, 30.0)
        .expect("valid fixture")
}

pub fn audio_band(n: usize) -> FrequencyGrid {
    FrequencyGrid::log(5.0, 5000.0, n).expect("valid fixture")
}

//! Fourier-limited time/frequency tiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Smallest time-frequency area a mode can occupy, `Δf·Δt = 1/(4π)`.
pub fn min_fourier_area() -> f64 {
    1.0 / (4.0 * PI)
}

const AREA_RTOL: f64 = 1e-12;

/// A mode centred on `f_center ± half_bandwidth` and `t_center ± half_duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeWindow {
    f_center: f64,
    half_bandwidth: f64,
    t_center: f64,
    half_duration: f64,
}

impl ModeWindow {
    pub fn new(f_center: f64, half_bandwidth: f64, t_center: f64, half_duration: f64) -> Result<Self> {
        ensure_positive("half_bandwidth", half_bandwidth)?;
        ensure_positive("half_duration", half_duration)?;
        if !f_center.is_finite() || !t_center.is_finite() {
            return Err(Error::invalid("window centre", "must be finite"));
        }
        let area = half_bandwidth * half_duration;
        if area < min_fourier_area() * (1.0 - AREA_RTOL) {
            return Err(Error::invalid(
                "mode window",
                format!(
                    "time-bandwidth product {area} is below the Fourier limit {}",
                    min_fourier_area()
                ),
            ));
        }
        Ok(Self {
            f_center,
            half_bandwidth,
            t_center,
            half_duration,
        })
    }

    pub fn f_center(&self) -> f64 {
        self.f_center
    }

    pub fn half_bandwidth(&self) -> f64 {
        self.half_bandwidth
    }

    pub fn t_center(&self) -> f64 {
        self.t_center
    }

    pub fn half_duration(&self) -> f64 {
        self.half_duration
    }

    pub fn area(&self) -> f64 {
        self.half_bandwidth * self.half_duration
    }
}

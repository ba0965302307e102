//! Probe calculators: ground-state width of a mechanical oscillator,
//! decoherence survival and SQL-margin bounds on extra displacement noise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::consts::HBAR;
use crate::error::{ensure_positive, Error, Result};
use crate::optomech::NoiseSpectrum;

/// Published half-width for the 5 ng / 500 Hz single-photon proposal, m.
/// It does not follow from the ground-state formula at those parameters.
pub const QUOTED_MARSHALL_WIDTH: f64 = 6e-13;
pub const MARSHALL_MASS: f64 = 5e-12;
pub const MARSHALL_FREQUENCY: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalOscillator {
    pub mass: f64,
    pub resonance: f64,
}

impl MechanicalOscillator {
    pub fn new(mass: f64, resonance: f64) -> Result<Self> {
        Ok(Self {
            mass: ensure_positive("mass", mass)?,
            resonance: ensure_positive("resonance", resonance)?,
        })
    }

    pub fn marshall() -> Self {
        Self {
            mass: MARSHALL_MASS,
            resonance: MARSHALL_FREQUENCY,
        }
    }

    /// `sqrt(ħ/(4π m f_m))`.
    pub fn zero_point_width(&self) -> f64 {
        (HBAR / (4.0 * PI * self.mass * self.resonance)).sqrt()
    }

    /// The published width for this oscillator, if it is the single-photon
    /// proposal's (5 ng, 500 Hz).
    pub fn quoted_width(&self) -> Option<f64> {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b;
        (same(self.mass, MARSHALL_MASS) && same(self.resonance, MARSHALL_FREQUENCY))
            .then_some(QUOTED_MARSHALL_WIDTH)
    }
}

pub fn zero_point_width(osc: &MechanicalOscillator) -> f64 {
    osc.zero_point_width()
}

/// A named decoherence channel with characteristic time `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceScenario {
    pub label: String,
    pub tau: f64,
}

impl DecoherenceScenario {
    pub fn new(label: impl Into<String>, tau: f64) -> Result<Self> {
        Ok(Self {
            label: label.into(),
            tau: ensure_positive("tau", tau)?,
        })
    }

    /// Thermalisation of a 50 Hz mode of km-scale mirrors, ≈ 3 ms.
    pub fn thermal_ligo() -> Self {
        Self {
            label: "thermalization (LIGO 50 Hz mode)".into(),
            tau: 3e-3,
        }
    }

    /// Gravitational decoherence time scale, ≈ 1 µs.
    pub fn gravitational() -> Self {
        Self {
            label: "gravitational decoherence".into(),
            tau: 1e-6,
        }
    }

    /// Exponential survival `exp(−t/τ)`.
    pub fn survival_fraction(&self, t_verify: f64) -> Result<f64> {
        if !(t_verify.is_finite() && t_verify >= 0.0) {
            return Err(Error::invalid("t_verify", format!("must be >= 0, got {t_verify}")));
        }
        Ok((-t_verify / self.tau).exp())
    }
}

pub fn survival_fraction(scenario: &DecoherenceScenario, t_verify: f64) -> Result<f64> {
    scenario.survival_fraction(t_verify)
}

pub const DEFAULT_BOUND_TOLERANCE: f64 = 0.05;

/// Per-bin detail of a decoherence bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinMargin {
    pub f: f64,
    pub model: f64,
    pub observed: f64,
    pub sql: f64,
    /// `observed·(1 + tol) − model`: extra noise this bin alone admits.
    pub headroom: f64,
    /// `sql − observed`; positive where the observation sits below the SQL.
    pub sub_sql_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceBound {
    /// Largest band-constant additive displacement PSD, m²/Hz.
    pub bound: f64,
    /// Frequency of the bin that sets the bound.
    pub limiting_frequency: f64,
    pub margins: Vec<BinMargin>,
}

/// Largest constant `B ≥ 0` such that `model + B ≤ observed·(1 + tol)` in every
/// bin of `band`.
pub fn decoherence_upper_bound(
    model: &NoiseSpectrum,
    observed: &NoiseSpectrum,
    sql: &NoiseSpectrum,
    band: (f64, f64),
    tol: f64,
) -> Result<DecoherenceBound> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid("tolerance", format!("must be >= 0, got {tol}")));
    }
    model.check_same_grid(observed)?;
    model.check_same_grid(sql)?;
    let range = model.grid().band_indices(band.0, band.1)?;
    let margins: Vec<BinMargin> = range
        .map(|i| {
            let (m, o, s) = (model.values()[i], observed.values()[i], sql.values()[i]);
            BinMargin {
                f: model.grid().points()[i],
                model: m,
                observed: o,
                sql: s,
                headroom: o * (1.0 + tol) - m,
                sub_sql_margin: s - o,
            }
        })
        .collect();
    let limiting = margins
        .iter()
        .min_by(|a, b| a.headroom.total_cmp(&b.headroom))
        .ok_or(Error::EmptyBand {
            lo: band.0,
            hi: band.1,
        })?;
    Ok(DecoherenceBound {
        bound: limiting.headroom.max(0.0),
        limiting_frequency: limiting.f,
        margins,
    })
}

//! Spectral quantum-noise model of a free-mass interferometer.
//!
//! The coupling between light and mirror is summarised by the Kimble factor
//!
//! ```text
//! K(f) = 2 J γ / ((2π)³ f² (γ² + f²)),   J = 8π ν₀ P_arm / (M L c)
//! ```
//!
//! and the displacement-referred quantum noise with squeezed injection at angle
//! `θ` is
//!
//! ```text
//! S_x(f) = x²_SQL/2 · (1/K + K) · [V₋ cos²(θ − ϑ) + V₊ sin²(θ − ϑ)],   ϑ = arctan K
//! ```
//!
//! where `V₋`/`V₊` are the squeezed/anti-squeezed variances relative to vacuum
//! (`e^{∓2r}` for a pure state). `θ = 0` places the anti-squeezed quadrature on
//! the amplitude quadrature, which squeezes shot noise and amplifies radiation
//! pressure noise.
//!
//! `γ` is taken as a Fourier frequency in Hz and enters `K` verbatim.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::consts::{C, HBAR};
use crate::error::{ensure_positive, Error, Result};
use crate::grid::FrequencyGrid;

/// Interferometer parameters entering the Kimble factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometerConfig {
    /// Mirror mass `M`, kg.
    pub mirror_mass: f64,
    /// Arm length `L`, m.
    pub arm_length: f64,
    /// Circulating arm power `P_arm`, W.
    pub arm_power: f64,
    /// Laser carrier frequency `ν₀`, Hz.
    pub laser_frequency: f64,
    /// Detector bandwidth `γ`, Hz.
    pub bandwidth: f64,
}

impl InterferometerConfig {
    pub fn new(
        mirror_mass: f64,
        arm_length: f64,
        arm_power: f64,
        laser_frequency: f64,
        bandwidth: f64,
    ) -> Result<Self> {
        Ok(Self {
            mirror_mass: ensure_positive("mirror_mass", mirror_mass)?,
            arm_length: ensure_positive("arm_length", arm_length)?,
            arm_power: ensure_positive("arm_power", arm_power)?,
            laser_frequency: ensure_positive("laser_frequency", laser_frequency)?,
            bandwidth: ensure_positive("bandwidth", bandwidth)?,
        })
    }

    /// Chooses the arm power so that `K(f_sql) = 1`, all other parameters fixed.
    pub fn with_sql_frequency(
        mirror_mass: f64,
        arm_length: f64,
        laser_frequency: f64,
        bandwidth: f64,
        f_sql: f64,
    ) -> Result<Self> {
        ensure_positive("f_sql", f_sql)?;
        ensure_positive("mirror_mass", mirror_mass)?;
        ensure_positive("arm_length", arm_length)?;
        ensure_positive("laser_frequency", laser_frequency)?;
        ensure_positive("bandwidth", bandwidth)?;
        let j = (2.0 * PI).powi(3) * f_sql * f_sql * (bandwidth * bandwidth + f_sql * f_sql)
            / (2.0 * bandwidth);
        let arm_power = j * mirror_mass * arm_length * C / (8.0 * PI * laser_frequency);
        Self::new(mirror_mass, arm_length, arm_power, laser_frequency, bandwidth)
    }

    /// `J = 8π ν₀ P_arm / (M L c)`, s⁻³.
    pub fn coupling_strength(&self) -> f64 {
        8.0 * PI * self.laser_frequency * self.arm_power
            / (self.mirror_mass * self.arm_length * C)
    }

    /// `2Jγ/(2π)³`: the constant with `K(f)·f²(γ²+f²) = kimble_scale()`.
    pub fn kimble_scale(&self) -> f64 {
        2.0 * self.coupling_strength() * self.bandwidth / (2.0 * PI).powi(3)
    }

    pub fn kimble_factor(&self, f: f64) -> Result<f64> {
        ensure_positive("frequency", f)?;
        let g = self.bandwidth;
        Ok(self.kimble_scale() / (f * f * (g * g + f * f)))
    }

    /// `ϑ(f) = arctan K(f)`, the rotation the ponderomotive coupling applies
    /// to the read-out quadrature at frequency `f`.
    pub fn readout_rotation(&self, f: f64) -> Result<f64> {
        Ok(self.kimble_factor(f)?.atan())
    }
}

/// Complex mechanical response `x = χ F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Susceptibility {
    FreeMass { mass: f64 },
    DampedOscillator { mass: f64, resonance: f64, quality: f64 },
}

impl Susceptibility {
    pub fn free_mass(mass: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        Ok(Self::FreeMass { mass })
    }

    pub fn damped_oscillator(mass: f64, resonance: f64, quality: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("resonance", resonance)?;
        ensure_positive("quality", quality)?;
        Ok(Self::DampedOscillator {
            mass,
            resonance,
            quality,
        })
    }

    /// `χ(f)` in m/N.
    pub fn response(&self, f: f64) -> Result<Complex64> {
        ensure_positive("frequency", f)?;
        let w = 2.0 * PI * f;
        Ok(match *self {
            Susceptibility::FreeMass { mass } => Complex64::new(-1.0 / (mass * w * w), 0.0),
            Susceptibility::DampedOscillator {
                mass,
                resonance,
                quality,
            } => {
                let w0 = 2.0 * PI * resonance;
                let denom = Complex64::new(w0 * w0 - w * w, w0 * w / quality) * mass;
                denom.inv()
            }
        })
    }
}

/// Wrapper around [`Susceptibility::response`].
pub fn susceptibility(s: &Susceptibility, f: f64) -> Result<Complex64> {
    s.response(f)
}

/// Label of a spectral curve in a noise budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    /// Quantum measurement (shot) noise.
    Qmn,
    /// Quantum back-action (radiation pressure) noise.
    Qbn,
    TotalQuantum,
    Sql,
    Classical,
    Total,
}

impl Component {
    pub fn as_str(&self) -> &'static str {
        match self {
            Component::Qmn => "qmn",
            Component::Qbn => "qbn",
            Component::TotalQuantum => "total_quantum",
            Component::Sql => "sql",
            Component::Classical => "classical",
            Component::Total => "total",
        }
    }
}

/// One-sided displacement PSD (m²/Hz) sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSpectrum {
    grid: FrequencyGrid,
    component: Component,
    values: Vec<f64>,
}

impl NoiseSpectrum {
    pub fn new(grid: FrequencyGrid, component: Component, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch {
                left: grid.len(),
                right: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(
                "spectrum value",
                format!("PSD values must be finite and >= 0, got {v}"),
            ));
        }
        Ok(Self {
            grid,
            component,
            values,
        })
    }

    fn from_fn(
        grid: &FrequencyGrid,
        component: Component,
        mut psd: impl FnMut(f64) -> Result<f64>,
    ) -> Result<Self> {
        let values = grid.iter().map(&mut psd).collect::<Result<Vec<_>>>()?;
        Self::new(grid.clone(), component, values)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn component(&self) -> Component {
        self.component
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Amplitude spectral density, m/√Hz.
    pub fn asd(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.sqrt()).collect()
    }

    /// Same values under a different label.
    pub fn relabel(mut self, component: Component) -> Self {
        self.component = component;
        self
    }

    pub(crate) fn check_same_grid(&self, other: &NoiseSpectrum) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

/// Free-mass SQL amplitude, `x_SQL(f) = (1/2π)·sqrt(8ħ/(M f²))`, m/√Hz.
pub fn sql_asd(mass: f64, f: f64) -> Result<f64> {
    Ok(sql_psd(mass, f)?.sqrt())
}

/// `x²_SQL(f)`, m²/Hz.
pub fn sql_psd(mass: f64, f: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("frequency", f)?;
    Ok(8.0 * HBAR / (mass * f * f) / (4.0 * PI * PI))
}

pub fn sql_spectrum(mass: f64, grid: &FrequencyGrid) -> Result<NoiseSpectrum> {
    NoiseSpectrum::from_fn(grid, Component::Sql, |f| sql_psd(mass, f))
}

/// Shot noise, back action and their sum for vacuum input.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBudget {
    pub qmn: NoiseSpectrum,
    pub qbn: NoiseSpectrum,
    pub total: NoiseSpectrum,
}

/// `S_x = (x²_SQL/2)(1/K + K)`, split into `qmn = x²_SQL/(2K)` and `qbn = x²_SQL·K/2`.
pub fn quantum_noise_unsqueezed(
    cfg: &InterferometerConfig,
    grid: &FrequencyGrid,
) -> Result<QuantumBudget> {
    let mut qmn = Vec::with_capacity(grid.len());
    let mut qbn = Vec::with_capacity(grid.len());
    let mut total = Vec::with_capacity(grid.len());
    for f in grid.iter() {
        let half_sql = 0.5 * sql_psd(cfg.mirror_mass, f)?;
        let k = cfg.kimble_factor(f)?;
        let (m, b) = (half_sql / k, half_sql * k);
        qmn.push(m);
        qbn.push(b);
        total.push(m + b);
    }
    Ok(QuantumBudget {
        qmn: NoiseSpectrum::new(grid.clone(), Component::Qmn, qmn)?,
        qbn: NoiseSpectrum::new(grid.clone(), Component::Qbn, qbn)?,
        total: NoiseSpectrum::new(grid.clone(), Component::TotalQuantum, total)?,
    })
}

/// Squeezed and anti-squeezed quadrature variances of the injected field,
/// as ratios to vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectedVariances {
    pub squeezed: f64,
    pub antisqueezed: f64,
}

impl InjectedVariances {
    pub const VACUUM: InjectedVariances = InjectedVariances {
        squeezed: 1.0,
        antisqueezed: 1.0,
    };

    pub fn new(squeezed: f64, antisqueezed: f64) -> Result<Self> {
        ensure_positive("squeezed variance", squeezed)?;
        ensure_positive("antisqueezed variance", antisqueezed)?;
        if squeezed * antisqueezed < 1.0 - 1e-12 {
            return Err(Error::invalid(
                "injected variances",
                format!("product {} violates the uncertainty bound", squeezed * antisqueezed),
            ));
        }
        Ok(Self {
            squeezed,
            antisqueezed,
        })
    }

    /// Pure squeezed vacuum, `(e^{-2r}, e^{2r})`.
    pub fn pure(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid("squeeze factor", format!("must be >= 0, got {r}")));
        }
        Ok(Self {
            squeezed: (-2.0 * r).exp(),
            antisqueezed: (2.0 * r).exp(),
        })
    }

    /// Variance ratio on the amplitude quadrature for injection angle `theta`.
    pub fn amplitude(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.antisqueezed * c * c + self.squeezed * s * s
    }

    /// Variance ratio on the phase quadrature for injection angle `theta`.
    pub fn phase(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.antisqueezed * s * s + self.squeezed * c * c
    }

    /// Bracket of the squeezed-injection spectrum for injection angle `theta`
    /// and read-out rotation `rotation = arctan K`.
    pub fn bracket(&self, theta: f64, rotation: f64) -> f64 {
        let (s, c) = (theta - rotation).sin_cos();
        self.squeezed * c * c + self.antisqueezed * s * s
    }
}

/// Quantum noise PSD at one frequency for injection angle `theta` (rad).
pub fn injected_psd_at(
    cfg: &InterferometerConfig,
    injected: &InjectedVariances,
    theta: f64,
    f: f64,
) -> Result<f64> {
    let k = cfg.kimble_factor(f)?;
    let base = 0.5 * sql_psd(cfg.mirror_mass, f)? * (1.0 / k + k);
    Ok(base * injected.bracket(theta, k.atan()))
}

/// Squeezed-injection quantum noise for a pure squeezed state of factor `r`.
///
/// `theta` is taken modulo π.
pub fn quantum_noise_squeezed(
    cfg: &InterferometerConfig,
    r: f64,
    theta: f64,
    grid: &FrequencyGrid,
) -> Result<NoiseSpectrum> {
    quantum_noise_injected(cfg, &InjectedVariances::pure(r)?, theta, grid)
}

/// Squeezed-injection quantum noise for an arbitrary (possibly lossy) injected state.
pub fn quantum_noise_injected(
    cfg: &InterferometerConfig,
    injected: &InjectedVariances,
    theta: f64,
    grid: &FrequencyGrid,
) -> Result<NoiseSpectrum> {
    if !theta.is_finite() {
        return Err(Error::invalid("squeeze angle", "must be finite"));
    }
    NoiseSpectrum::from_fn(grid, Component::TotalQuantum, |f| {
        injected_psd_at(cfg, injected, theta, f)
    })
}

/// Shot noise, back action and total quantum noise for an injected state.
///
/// `qmn` scales with the injected phase-quadrature variance and `qbn` with the
/// amplitude-quadrature variance. For `theta` off the principal axes the two
/// quadratures are correlated and `qmn + qbn` differs from `total` by the
/// correlation term.
pub fn quantum_budget_injected(
    cfg: &InterferometerConfig,
    injected: &InjectedVariances,
    theta: f64,
    grid: &FrequencyGrid,
) -> Result<QuantumBudget> {
    let vacuum = quantum_noise_unsqueezed(cfg, grid)?;
    let (va, vp) = (injected.amplitude(theta), injected.phase(theta));
    let scale = |s: &NoiseSpectrum, v: f64| {
        NoiseSpectrum::new(s.grid.clone(), s.component, s.values.iter().map(|x| x * v).collect())
    };
    Ok(QuantumBudget {
        qmn: scale(&vacuum.qmn, vp)?,
        qbn: scale(&vacuum.qbn, va)?,
        total: quantum_noise_injected(cfg, injected, theta, grid)?,
    })
}

/// Quadrature input-output relation of a movable mirror (phase factors dropped):
/// `b_X = a_X`, `b_Y = a_Y − K a_X − signal`.
pub fn input_output(k: f64, a_x: f64, a_y: f64, signal: f64) -> (f64, f64) {
    (a_x, a_y - k * a_x - signal)
}

/// Bin-wise sum of two spectra on the same grid.
pub fn total_noise(quantum: &NoiseSpectrum, classical: &NoiseSpectrum) -> Result<NoiseSpectrum> {
    quantum.check_same_grid(classical)?;
    let values = quantum
        .values
        .iter()
        .zip(&classical.values)
        .map(|(a, b)| a + b)
        .collect();
    NoiseSpectrum::new(quantum.grid.clone(), Component::Total, values)
}

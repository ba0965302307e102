//! Run configuration: a JSON document with optional sections, each command
//! pulling the sections it needs.
//!
//! Angles are in degrees, squeezing in dB. Relative CSV paths resolve against
//! the directory of the config file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qnoise_core::consts::C;
use qnoise_core::{
    EfficiencyChain, FrequencyGrid, InterferometerConfig, MechanicalOscillator, SqueezerConfig,
    Stage, Weighting,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interferometer: Option<InterferometerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezer: Option<SqueezerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    /// Two-column CSV `f_hz,psd_m2_per_hz` of non-quantum noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_noise_csv: Option<PathBuf>,
    /// Two-column CSV `f_hz,psd_m2_per_hz` of a measured spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_noise_csv: Option<PathBuf>,
    /// `[lo, hi]` in Hz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighting: Option<Weighting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillator: Option<OscillatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSection>,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Exactly one of `arm_power_w`/`sql_frequency_hz` and one of
/// `laser_frequency_hz`/`laser_wavelength_m` must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSection {
    pub mirror_mass_kg: f64,
    pub arm_length_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sql_frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laser_frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laser_wavelength_m: Option<f64>,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezerSection {
    pub generated_db: f64,
    #[serde(default)]
    pub angle_deg: f64,
    #[serde(default)]
    pub chain: Vec<StageSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSection {
    pub label: String,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub f_min: f64,
    pub f_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSection {
    pub mass_kg: f64,
    pub resonance_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    /// Apply the ponderomotive map with `K` evaluated at this frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ponderomotive_at_hz: Option<f64>,
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(path, format!("must be a finite number > 0, got {v}")))
    }
}

fn exactly_one(path_a: &str, a: Option<f64>, path_b: &str, b: Option<f64>) -> Result<()> {
    match (a, b) {
        (Some(_), Some(_)) => Err(CliError::config(
            path_a,
            format!("conflicts with {path_b}; give exactly one"),
        )),
        (None, None) => Err(CliError::config(
            path_a,
            format!("missing; give {path_a} or {path_b}"),
        )),
        _ => Ok(()),
    }
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad * 180.0 / PI
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Config(format!("schema: {inner}"))
            } else {
                CliError::config(&path, inner)
            }
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn interferometer(&self) -> Result<InterferometerConfig> {
        let s = self
            .interferometer
            .as_ref()
            .ok_or_else(|| CliError::config("interferometer", "section required by this command"))?;
        let mass = positive("interferometer.mirror_mass_kg", s.mirror_mass_kg)?;
        let length = positive("interferometer.arm_length_m", s.arm_length_m)?;
        let gamma = positive("interferometer.bandwidth_hz", s.bandwidth_hz)?;
        exactly_one(
            "interferometer.laser_frequency_hz",
            s.laser_frequency_hz,
            "interferometer.laser_wavelength_m",
            s.laser_wavelength_m,
        )?;
        let nu0 = match (s.laser_frequency_hz, s.laser_wavelength_m) {
            (Some(f), _) => positive("interferometer.laser_frequency_hz", f)?,
            (None, Some(w)) => C / positive("interferometer.laser_wavelength_m", w)?,
            (None, None) => unreachable!(),
        };
        exactly_one(
            "interferometer.arm_power_w",
            s.arm_power_w,
            "interferometer.sql_frequency_hz",
            s.sql_frequency_hz,
        )?;
        match (s.arm_power_w, s.sql_frequency_hz) {
            (Some(p), _) => {
                let p = positive("interferometer.arm_power_w", p)?;
                InterferometerConfig::new(mass, length, p, nu0, gamma)
                    .map_err(|e| CliError::core("interferometer", e))
            }
            (None, Some(f)) => {
                let f = positive("interferometer.sql_frequency_hz", f)?;
                InterferometerConfig::with_sql_frequency(mass, length, nu0, gamma, f)
                    .map_err(|e| CliError::core("interferometer", e))
            }
            (None, None) => unreachable!(),
        }
    }

    pub fn squeezer(&self) -> Result<Option<SqueezerConfig>> {
        let Some(s) = &self.squeezer else {
            return Ok(None);
        };
        if !(s.generated_db.is_finite() && s.generated_db >= 0.0) {
            return Err(CliError::config(
                "squeezer.generated_db",
                format!("must be a finite number >= 0, got {}", s.generated_db),
            ));
        }
        if !s.angle_deg.is_finite() {
            return Err(CliError::config("squeezer.angle_deg", "must be finite"));
        }
        let stages = s
            .chain
            .iter()
            .enumerate()
            .map(|(i, st)| {
                Stage::new(st.label.clone(), st.efficiency).map_err(|_| {
                    CliError::config(
                        &format!("squeezer.chain[{i}].efficiency"),
                        format!("must be in [0, 1], got {}", st.efficiency),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = EfficiencyChain::new(stages).map_err(|e| CliError::core("squeezer.chain", e))?;
        SqueezerConfig::new(s.generated_db, deg_to_rad(s.angle_deg), chain)
            .map(Some)
            .map_err(|e| CliError::core("squeezer", e))
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::config("grid", "section required by this command"))?;
        positive("grid.f_min", g.f_min)?;
        positive("grid.f_max", g.f_max)?;
        if g.f_max <= g.f_min {
            return Err(CliError::config(
                "grid.f_max",
                format!("must exceed grid.f_min ({} <= {})", g.f_max, g.f_min),
            ));
        }
        if g.n < 2 {
            return Err(CliError::config("grid.n", format!("must be >= 2, got {}", g.n)));
        }
        FrequencyGrid::log(g.f_min, g.f_max, g.n).map_err(|e| CliError::core("grid", e))
    }

    /// Command-line band wins over the config's.
    pub fn band(&self, override_band: Option<(f64, f64)>) -> Result<(f64, f64)> {
        let (lo, hi, path) = match (override_band, self.band) {
            (Some((lo, hi)), _) => (lo, hi, "--band"),
            (None, Some([lo, hi])) => (lo, hi, "band"),
            (None, None) => {
                return Err(CliError::config("band", "required (config `band` or --band LO:HI)"))
            }
        };
        positive(path, lo)?;
        positive(path, hi)?;
        if hi <= lo {
            return Err(CliError::config(path, format!("need LO < HI, got {lo}:{hi}")));
        }
        Ok((lo, hi))
    }

    pub fn oscillator(&self) -> Result<MechanicalOscillator> {
        match &self.oscillator {
            None => Ok(MechanicalOscillator::marshall()),
            Some(o) => {
                let m = positive("oscillator.mass_kg", o.mass_kg)?;
                let f = positive("oscillator.resonance_hz", o.resonance_hz)?;
                MechanicalOscillator::new(m, f).map_err(|e| CliError::core("oscillator", e))
            }
        }
    }
}

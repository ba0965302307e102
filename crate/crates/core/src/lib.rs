//! Quantum-noise budget engine for laser-interferometric position sensing.
//!
//! The crate is split by physical concern:
//!
//! * [`consts`], [`grid`], [`window`]: constants, Fourier-frequency grids and
//!   Fourier-limited mode tiles.
//! * [`optomech`]: Kimble factor, standard quantum limit and displacement-referred
//!   quantum noise spectra, with and without squeezed-light injection.
//! * [`gaussian`]: single-mode Gaussian quadrature states (covariance matrices),
//!   ponderomotive transform, loss, homodyne readout.
//! * [`squeezer`]: dB conversions and efficiency chains.
//! * [`probes`]: ground-state width, decoherence survival and SQL-margin bounds.
//! * [`optimize`]: `f_SQL` root finding and squeeze-angle optimisation.
//!
//! Conventions: all PSDs are one-sided, all frequencies are Fourier frequencies
//! in Hz (never angular), quadrature variances use vacuum = 1/4.

pub mod consts;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod optimize;
pub mod optomech;
pub mod probes;
pub mod squeezer;
pub mod window;

pub use error::{Error, Result};
pub use gaussian::CovarianceState;
pub use grid::FrequencyGrid;
pub use optimize::{BandObjective, BandOptimum, Weighting};
pub use optomech::{
    Component, InjectedVariances, InterferometerConfig, NoiseSpectrum, QuantumBudget,
    Susceptibility,
};
pub use probes::{DecoherenceBound, DecoherenceScenario, MechanicalOscillator};
pub use squeezer::{EfficiencyChain, SqueezerConfig, Stage};
pub use window::ModeWindow;

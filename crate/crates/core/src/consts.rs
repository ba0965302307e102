//! Physical constants (CODATA 2018 exact / recommended values).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Vacuum variance of a single quadrature (`ΔX = 1/2`).
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Bundle of the constants used by the noise models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    pub hbar: f64,
    pub c: f64,
}

impl PhysConstants {
    pub const CODATA: PhysConstants = PhysConstants { hbar: HBAR, c: C };
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

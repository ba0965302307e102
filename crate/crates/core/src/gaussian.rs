//! Single-mode Gaussian quadrature states.
//!
//! A state is the symmetric covariance matrix of the amplitude (`X̂`) and phase
//! (`Ŷ`) quadratures. Vacuum has variance 1/4 in every direction, and any
//! physical state satisfies `det Σ ≥ 1/16`.
//!
//! Homodyne angle `ζ` reads `X̂ sin ζ + Ŷ cos ζ`, so `ζ = 0` is the phase
//! quadrature a single photodiode sees. The squeeze angle of [`CovarianceState::squeezed`]
//! is the direction of the squeezed axis measured from `X̂`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::consts::VACUUM_VARIANCE;
use crate::error::{Error, Result};

const VACUUM_DET: f64 = VACUUM_VARIANCE * VACUUM_VARIANCE;
const DET_RTOL: f64 = 1e-12;
/// Anisotropy below which a state is treated as isotropic for angle queries.
const ISOTROPY_TOL: f64 = 1e-14;

/// Covariance of one Gaussian mode, stored as `Σ = ν·Σₚ` where `ν = 4·sqrt(det Σ) ≥ 1`
/// is the symplectic eigenvalue and `Σₚ` is a pure-state covariance
/// (`det Σₚ = 1/16`). Symplectic maps act on `Σₚ` alone, so they leave `det Σ`
/// untouched regardless of how anisotropic the state becomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceState {
    nu: f64,
    pxx: f64,
    pxy: f64,
}

#[derive(Deserialize)]
struct RawCovariance {
    cxx: f64,
    cyy: f64,
    cxy: f64,
}

impl<'de> Deserialize<'de> for CovarianceState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCovariance::deserialize(d)?;
        CovarianceState::new(raw.cxx, raw.cyy, raw.cxy).map_err(serde::de::Error::custom)
    }
}

/// `a·d − b·c` with a single rounding of the cancellation (Kahan).
fn diff_of_products(a: f64, d: f64, b: f64, c: f64) -> f64 {
    let w = b * c;
    let err = (-b).mul_add(c, w);
    a.mul_add(d, -w) + err
}

/// Eigen-decomposition of a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalAxes {
    /// Homodyne angle (rad, in `[0, π)`) reading the minimum variance.
    pub min_angle: f64,
    pub min_variance: f64,
    pub max_variance: f64,
}

impl CovarianceState {
    pub fn new(cxx: f64, cyy: f64, cxy: f64) -> Result<Self> {
        if !(cxx.is_finite() && cyy.is_finite() && cxy.is_finite()) {
            return Err(Error::invalid("covariance", "entries must be finite"));
        }
        if cxx <= 0.0 || cyy <= 0.0 {
            return Err(Error::invalid(
                "covariance",
                format!("variances must be > 0 (cxx = {cxx}, cyy = {cyy})"),
            ));
        }
        let det = diff_of_products(cxx, cyy, cxy, cxy);
        if det < VACUUM_DET * (1.0 - DET_RTOL) {
            return Err(Error::invalid(
                "covariance",
                format!("det = {det} violates the Heisenberg bound 1/16"),
            ));
        }
        let nu = (det.sqrt() / VACUUM_VARIANCE).max(1.0);
        Ok(Self::from_parts(nu, cxx / nu, cxy / nu))
    }

    fn from_parts(nu: f64, pxx: f64, pxy: f64) -> Self {
        Self { nu, pxx, pxy }
    }

    /// `Σₚ[1,1]`, implied by `det Σₚ = 1/16`.
    fn pyy(&self) -> f64 {
        (VACUUM_DET + self.pxy * self.pxy) / self.pxx
    }

    pub fn vacuum() -> Self {
        Self::from_parts(1.0, VACUUM_VARIANCE, 0.0)
    }

    /// Pure squeezed vacuum: `diag(e^{-2r}, e^{2r})/4` rotated so the squeezed
    /// axis points at `angle` from `X̂`.
    pub fn squeezed(r: f64, angle: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid("squeeze factor", format!("must be >= 0, got {r}")));
        }
        let (lo, hi) = ((-2.0 * r).exp() * VACUUM_VARIANCE, (2.0 * r).exp() * VACUUM_VARIANCE);
        let (s, c) = angle.sin_cos();
        Ok(Self::from_parts(1.0, lo * c * c + hi * s * s, (lo - hi) * s * c))
    }

    /// State injected with squeeze angle `theta` in the noise-spectrum
    /// convention, where `theta = 0` anti-squeezes the amplitude quadrature.
    pub fn injected(r: f64, theta: f64) -> Result<Self> {
        Self::squeezed(r, theta + FRAC_PI_2)
    }

    pub fn cxx(&self) -> f64 {
        self.nu * self.pxx
    }

    pub fn cyy(&self) -> f64 {
        self.nu * self.pyy()
    }

    pub fn cxy(&self) -> f64 {
        self.nu * self.pxy
    }

    pub fn det(&self) -> f64 {
        self.nu * self.nu * VACUUM_DET
    }

    /// Symplectic eigenvalue in vacuum units, `4·sqrt(det Σ)`.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        self.nu
    }

    pub fn trace(&self) -> f64 {
        self.cxx() + self.cyy()
    }

    /// Radiation-pressure coupling `Ŷ → Ŷ − K X̂`, i.e. `Σ → SΣSᵀ` with
    /// `S = [[1, 0], [−K, 1]]`.
    pub fn ponderomotive(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid("kimble factor", format!("must be >= 0, got {k}")));
        }
        Ok(Self::from_parts(self.nu, self.pxx, self.pxy - k * self.pxx))
    }

    /// Mixes the state with vacuum: `Σ → ηΣ + (1 − η)/4·I`.
    pub fn loss_channel(&self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid("efficiency", format!("must be in [0, 1], got {eta}")));
        }
        let mix = (1.0 - eta) * VACUUM_VARIANCE;
        // det(A + cI) = det A + c·tr A + c²: every term is non-negative, so
        // the output determinant carries no cancellation error.
        let scaled = eta * self.nu;
        let det = scaled * scaled * VACUUM_DET + mix * scaled * (self.pxx + self.pyy()) + mix * mix;
        let nu = (det.sqrt() / VACUUM_VARIANCE).max(1.0);
        Ok(Self::from_parts(nu, (scaled * self.pxx + mix) / nu, scaled * self.pxy / nu))
    }

    /// Rotates the state's phase-space picture by `phi` (counter-clockwise in
    /// the `(X̂, Ŷ)` plane).
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (pxx, pyy, pxy) = (self.pxx, self.pyy(), self.pxy);
        Self::from_parts(
            self.nu,
            c * c * pxx - 2.0 * s * c * pxy + s * s * pyy,
            s * c * (pxx - pyy) + (c * c - s * s) * pxy,
        )
    }

    /// Variance of `X̂ sin ζ + Ŷ cos ζ`.
    pub fn homodyne_variance(&self, zeta: f64) -> f64 {
        let (s, c) = zeta.sin_cos();
        // uᵀΣₚu = (pxx·s + pxy·c)²/pxx + c²/(16·pxx): a sum of squares, so the
        // back-action cancellation at the evasion angle happens inside one
        // linear term instead of between large quadratic ones.
        let lin = self.pxx * s + self.pxy * c;
        self.nu * (lin * lin / self.pxx + VACUUM_DET * c * c / self.pxx)
    }

    /// Homodyne variance divided by `cos²ζ`, the factor by which a phase
    /// signal is projected onto the read quadrature.
    pub fn signal_normalized_variance(&self, zeta: f64) -> f64 {
        let c = zeta.cos();
        self.homodyne_variance(zeta) / (c * c)
    }

    pub fn principal_axes(&self) -> PrincipalAxes {
        let (cxx, cyy, cxy) = (self.cxx(), self.cyy(), self.cxy());
        let mean = 0.5 * (cxx + cyy);
        let half_diff = 0.5 * (cyy - cxx);
        let radius = half_diff.hypot(cxy);
        // variance(ζ) = mean + half_diff·cos2ζ + cxy·sin2ζ
        let min_angle = if radius <= ISOTROPY_TOL * mean {
            0.0
        } else {
            let two_zeta = (-cxy).atan2(-half_diff);
            (0.5 * two_zeta).rem_euclid(PI)
        };
        // λ_min from det/λ_max avoids cancellation for strongly squeezed states
        let max_variance = mean + radius;
        PrincipalAxes {
            min_angle: if min_angle >= PI { 0.0 } else { min_angle },
            min_variance: self.det() / max_variance,
            max_variance,
        }
    }

    /// Angle in `[0, π)` and value of the smallest homodyne variance.
    /// Isotropic states report angle 0.
    pub fn min_variance_angle(&self) -> (f64, f64) {
        let axes = self.principal_axes();
        (axes.min_angle, axes.min_variance)
    }

    /// `1/(4·sqrt(det Σ))`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        1.0 / self.nu
    }

    /// Product of the principal standard deviations relative to vacuum,
    /// `sqrt(det Σ)/(1/4)`.
    pub fn uncertainty_product(&self) -> f64 {
        self.nu
    }
}

impl Default for CovarianceState {
    fn default() -> Self {
        Self::vacuum()
    }
}

/// Homodyne angle at which the back-action term `K·a_X` cancels: `arctan K`.
pub fn evasion_angle(k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::invalid("kimble factor", format!("must be >= 0, got {k}")));
    }
    Ok(k.atan())
}

/// dB of a variance ratio relative to vacuum, `10·log₁₀(V/V₀)`.
pub fn variance_db(variance: f64) -> f64 {
    10.0 * (variance / VACUUM_VARIANCE).log10()
}

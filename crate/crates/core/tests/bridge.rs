//! Cross-checks between the spectral noise model and the covariance-matrix picture.

use std::f64::consts::PI;

use proptest::prelude::*;
use qnoise_core::optomech::{injected_psd_at, quantum_noise_squeezed, sql_psd};
use qnoise_core::squeezer::{db_to_r, lossy_variances};
use qnoise_core::{CovarianceState, FrequencyGrid, InjectedVariances, InterferometerConfig};

fn arb_cfg() -> impl Strategy<Value = InterferometerConfig> {
    (0.01f64..100.0, 1.0f64..5000.0, 1.0f64..1e6, 10.0f64..3e4)
        .prop_map(|(m, l, p, g)| InterferometerConfig::new(m, l, p, 2.8e14, g).unwrap())
}

/// Noise from the output phase-quadrature variance after the ponderomotive map.
fn covariance_route(cfg: &InterferometerConfig, state: &CovarianceState, f: f64) -> f64 {
    let k = cfg.kimble_factor(f).unwrap();
    let out = state.ponderomotive(k).unwrap();
    0.5 * sql_psd(cfg.mirror_mass, f).unwrap() / k * out.homodyne_variance(0.0) / 0.25
}

proptest! {
    #[test]
    fn bracket_is_rotated_homodyne_variance(
        cfg in arb_cfg(), r in 0.0f64..2.0, theta in -PI / 2.0..PI / 2.0, f in 1.0f64..1e4,
    ) {
        let rot = cfg.readout_rotation(f).unwrap();
        let state = CovarianceState::injected(r, theta).unwrap();
        let via_state = 4.0 * state.homodyne_variance(-rot);
        let via_formula = InjectedVariances::pure(r).unwrap().bracket(theta, rot);
        prop_assert!((via_state / via_formula - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ponderomotive_readout_reproduces_spectrum(
        cfg in arb_cfg(), r in 0.0f64..2.0, theta in -PI / 2.0..PI / 2.0, f in 1.0f64..1e4,
    ) {
        let grid = FrequencyGrid::single(f).unwrap();
        let spectral = quantum_noise_squeezed(&cfg, r, theta, &grid).unwrap().values()[0];
        let state = CovarianceState::injected(r, theta).unwrap();
        let cov = covariance_route(&cfg, &state, f);
        prop_assert!((cov / spectral - 1.0).abs() < 1e-9, "{} vs {}", cov, spectral);
    }

    #[test]
    fn lossy_injection_matches_loss_channel(
        cfg in arb_cfg(), db in 0.0f64..20.0, eta in 0.0f64..=1.0,
        theta in -PI / 2.0..PI / 2.0, f in 1.0f64..1e4,
    ) {
        let v = lossy_variances(db, eta);
        let spectral = injected_psd_at(&cfg, &v, theta, f).unwrap();
        let state = CovarianceState::injected(db_to_r(db), theta).unwrap()
            .loss_channel(eta).unwrap();
        let cov = covariance_route(&cfg, &state, f);
        prop_assert!((cov / spectral - 1.0).abs() < 1e-9);
    }
}

#[test]
fn grid_serialization_is_bit_exact() {
    let grid = FrequencyGrid::log(3.3, 7777.7, 513).unwrap();
    let text = serde_json::to_string(&grid).unwrap();
    let back: FrequencyGrid = serde_json::from_str(&text).unwrap();
    for (a, b) in grid.iter().zip(back.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

proptest! {
    #[test]
    fn grid_round_trip(lo in 1e-3f64..1e3, span in 1.001f64..1e4, n in 2usize..300) {
        let grid = FrequencyGrid::log(lo, lo * span, n).unwrap();
        let back: FrequencyGrid = serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        prop_assert_eq!(grid, back);
    }
}

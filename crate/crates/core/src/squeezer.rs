//! Squeezing levels in dB and the efficiency chain between squeezer and detector.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optomech::InjectedVariances;

/// `r = db·ln(10)/20`, so that `e^{2r} = 10^{db/10}`. The sign carries direction.
pub fn db_to_r(db: f64) -> f64 {
    db * LN_10 / 20.0
}

pub fn r_to_db(r: f64) -> f64 {
    r * 20.0 / LN_10
}

/// One lossy element between squeezer and photodetector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub efficiency: f64,
}

impl Stage {
    pub fn new(label: impl Into<String>, efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::invalid(
                "stage efficiency",
                format!("must be in [0, 1], got {efficiency}"),
            ));
        }
        Ok(Self {
            label: label.into(),
            efficiency,
        })
    }
}

/// Ordered list of efficiencies. Order is kept for reporting only; vacuum
/// loss channels compose multiplicatively.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EfficiencyChain {
    stages: Vec<Stage>,
}

impl EfficiencyChain {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        for s in &stages {
            Stage::new(s.label.clone(), s.efficiency)?;
        }
        Ok(Self { stages })
    }

    pub fn lossless() -> Self {
        Self::default()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn efficiency(&self) -> f64 {
        self.stages.iter().map(|s| s.efficiency).product()
    }

    /// Cumulative efficiency after each stage.
    pub fn cumulative(&self) -> impl Iterator<Item = (&Stage, f64)> + '_ {
        self.stages.iter().scan(1.0, |acc, s| {
            *acc *= s.efficiency;
            Some((s, *acc))
        })
    }
}

pub fn chain_efficiency(chain: &EfficiencyChain) -> f64 {
    chain.efficiency()
}

/// Squeezer settings: generated squeezing (positive dB below vacuum),
/// injection angle in rad and the loss chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezerConfig {
    pub generated_db: f64,
    pub angle: f64,
    pub chain: EfficiencyChain,
}

impl SqueezerConfig {
    pub fn new(generated_db: f64, angle: f64, chain: EfficiencyChain) -> Result<Self> {
        if !(generated_db.is_finite() && generated_db >= 0.0) {
            return Err(Error::invalid(
                "generated_db",
                format!("must be >= 0, got {generated_db}"),
            ));
        }
        if !angle.is_finite() {
            return Err(Error::invalid("angle", "must be finite"));
        }
        Ok(Self {
            generated_db,
            angle,
            chain,
        })
    }

    pub fn squeeze_factor(&self) -> f64 {
        db_to_r(self.generated_db)
    }

    /// Variances reaching the detector after the whole chain.
    pub fn detected_variances(&self) -> InjectedVariances {
        lossy_variances(self.generated_db, self.chain.efficiency())
    }
}

/// Squeezed/anti-squeezed variance ratios after mixing with vacuum at efficiency `eta`:
/// `V± = η·10^{±db/10} + (1 − η)`.
pub fn lossy_variances(db: f64, eta: f64) -> InjectedVariances {
    let ratio = 10f64.powf(db / 10.0);
    InjectedVariances {
        squeezed: eta / ratio + (1.0 - eta),
        antisqueezed: eta * ratio + (1.0 - eta),
    }
}

/// `(squeezed_db, antisqueezed_db)` at the detector for `db` of generated squeezing.
/// The squeezed side comes out negative.
pub fn effective_db_with_efficiency(db: f64, eta: f64) -> Result<(f64, f64)> {
    if !(db.is_finite() && db >= 0.0) {
        return Err(Error::invalid("squeezing", format!("must be >= 0 dB, got {db}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("efficiency", format!("must be in [0, 1], got {eta}")));
    }
    let v = lossy_variances(db, eta);
    Ok((10.0 * v.squeezed.log10(), 10.0 * v.antisqueezed.log10()))
}

pub fn effective_db(db: f64, chain: &EfficiencyChain) -> Result<(f64, f64)> {
    effective_db_with_efficiency(db, chain.efficiency())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::CovarianceState;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn virgo_chain() -> EfficiencyChain {
        EfficiencyChain::new(vec![
            Stage::new("injection", 0.9).unwrap(),
            Stage::new("readout", 0.6).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_r(0.0), 0.0);
        assert_relative_eq!((2.0 * db_to_r(10.0)).exp(), 10.0, max_relative = 1e-14);
        assert!(((2.0 * db_to_r(13.8)).exp() - 24.0).abs() < 0.02);
        assert_relative_eq!(r_to_db(db_to_r(7.3)), 7.3, max_relative = 1e-14);
    }

    #[test]
    fn chain_products() {
        assert_eq!(chain_efficiency(&EfficiencyChain::lossless()), 1.0);
        assert_relative_eq!(chain_efficiency(&virgo_chain()), 0.54, max_relative = 1e-15);
        let dead = EfficiencyChain::new(vec![
            Stage::new("a", 0.9).unwrap(),
            Stage::new("b", 0.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(chain_efficiency(&dead), 0.0);
        assert!(Stage::new("x", 1.5).is_err());
        let cum: Vec<f64> = virgo_chain().cumulative().map(|(_, e)| e).collect();
        assert_relative_eq!(cum[0], 0.9);
        assert_relative_eq!(cum[1], 0.54, max_relative = 1e-15);
    }

    #[test]
    fn virgo_effective_db() {
        let (sq, anti) = effective_db(13.8, &virgo_chain()).unwrap();
        assert!((anti - 11.3).abs() < 0.05, "{anti}");
        assert!((sq + 3.2).abs() < 0.05, "{sq}");
        let v = lossy_variances(13.8, 0.54);
        assert!((v.antisqueezed - 13.4).abs() < 0.05);
        assert!((v.squeezed - 0.48).abs() < 0.005);
    }

    #[test]
    fn lossless_is_symmetric() {
        for db in [0.0, 3.0, 13.8] {
            let (sq, anti) = effective_db_with_efficiency(db, 1.0).unwrap();
            assert_relative_eq!(sq, -db, epsilon = 1e-12);
            assert_relative_eq!(anti, db, epsilon = 1e-12);
        }
        assert!(effective_db_with_efficiency(-1.0, 1.0).is_err());
        assert!(effective_db_with_efficiency(1.0, 1.1).is_err());
    }

    proptest! {
        #[test]
        fn matches_covariance_loss(db in 0.0f64..20.0, eta in 0.0f64..=1.0) {
            let state = CovarianceState::squeezed(db_to_r(db), 0.0).unwrap()
                .loss_channel(eta).unwrap();
            let v = lossy_variances(db, eta);
            prop_assert!((state.cxx() / 0.25 - v.squeezed).abs() < 1e-12);
            prop_assert!((state.cyy() / 0.25 - v.antisqueezed).abs() < 1e-12 * v.antisqueezed.max(1.0));
        }

        #[test]
        fn monotone_in_efficiency(db in 0.1f64..20.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (vlo, vhi) = (lossy_variances(db, lo), lossy_variances(db, hi));
            prop_assert!(vlo.squeezed >= vhi.squeezed);
            prop_assert!(vlo.antisqueezed <= vhi.antisqueezed);
        }

        #[test]
        fn lossy_state_is_mixed(db in 0.1f64..20.0, eta in 0.0f64..0.999) {
            let v = lossy_variances(db, eta);
            if eta > 0.0 {
                prop_assert!((v.squeezed * v.antisqueezed).sqrt() > 1.0);
            }
        }
    }
}

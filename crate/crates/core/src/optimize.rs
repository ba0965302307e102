//! Root finding for `f_SQL` and squeeze-angle optimisation over a band.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::grid::FrequencyGrid;
use crate::optomech::{sql_psd, InjectedVariances, InterferometerConfig};

const PRESCAN_POINTS: usize = 64;
const GOLDEN_TOL: f64 = 1e-9;
const FLAT_RTOL: f64 = 1e-12;

/// Frequency at which `K(f) = 1`, by bisection on `ln f`.
pub fn find_f_sql(cfg: &InterferometerConfig) -> Result<f64> {
    if !(cfg.kimble_scale().is_finite() && cfg.kimble_scale() > 0.0) {
        return Err(Error::NoConvergence("f_SQL search (coupling constant not finite)"));
    }
    let k = |f: f64| match cfg.kimble_factor(f)? {
        v if v.is_nan() => Err(Error::NoConvergence("f_SQL search")),
        v => Ok(v),
    };
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut steps = 0;
    while k(lo)? < 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Err(Error::NoConvergence("f_SQL bracketing"));
        }
    }
    while k(hi)? > 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(Error::NoConvergence("f_SQL bracketing"));
        }
    }
    // K strictly decreasing: K(lo) >= 1 >= K(hi)
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if k(mid)? >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the end closer to unity
    let (klo, khi) = (k(lo)?, k(hi)?);
    Ok(if (klo - 1.0).abs() <= (khi - 1.0).abs() { lo } else { hi })
}

/// Squeeze angle minimising the noise at a single frequency, `arctan K(f)`.
pub fn optimal_angle_at(cfg: &InterferometerConfig, f: f64) -> Result<f64> {
    cfg.readout_rotation(f)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Plain sum of in-band PSDs.
    #[default]
    Flat,
    /// Each bin divided by the local `x²_SQL`.
    InverseSql,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandObjective {
    pub lo: f64,
    pub hi: f64,
    pub weighting: Weighting,
}

impl BandObjective {
    pub fn new(lo: f64, hi: f64, weighting: Weighting) -> Result<Self> {
        ensure_positive("band lower edge", lo)?;
        ensure_positive("band upper edge", hi)?;
        if hi <= lo {
            return Err(Error::invalid("band", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, weighting })
    }

    pub fn center(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }
}

/// Weighted in-band cost as a function of injection angle.
#[derive(Debug, Clone)]
pub struct BandCost {
    injected: InjectedVariances,
    /// (weight·(x²_SQL/2)(1/K + K), arctan K) per in-band bin.
    bins: Vec<(f64, f64)>,
}

impl BandCost {
    pub fn new(
        cfg: &InterferometerConfig,
        injected: InjectedVariances,
        obj: &BandObjective,
        grid: &FrequencyGrid,
    ) -> Result<Self> {
        let range = grid.band_indices(obj.lo, obj.hi)?;
        let bins = grid.points()[range]
            .iter()
            .map(|&f| {
                let k = cfg.kimble_factor(f)?;
                let sql = sql_psd(cfg.mirror_mass, f)?;
                let weight = match obj.weighting {
                    Weighting::Flat => 1.0,
                    Weighting::InverseSql => 1.0 / sql,
                };
                Ok((weight * 0.5 * sql * (1.0 / k + k), k.atan()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { injected, bins })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.bins
            .iter()
            .map(|&(base, rot)| base * self.injected.bracket(theta, rot))
            .sum()
    }

    pub fn bins(&self) -> usize {
        self.bins.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandOptimum {
    /// Optimal injection angle in `[0, π/2]`, rad.
    pub angle: f64,
    pub cost: f64,
    /// Set when the cost does not depend on the angle (no squeezing).
    pub flat: bool,
}

/// Golden-section search on `[0, π/2]`, seeded by a coarse pre-scan.
pub fn minimize_angle(cost: impl Fn(f64) -> f64) -> BandOptimum {
    let step = FRAC_PI_2 / (PRESCAN_POINTS - 1) as f64;
    let scan: Vec<(f64, f64)> = (0..PRESCAN_POINTS)
        .map(|i| {
            let t = step * i as f64;
            (t, cost(t))
        })
        .collect();
    let (best_i, &(best_t, best_c)) = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty scan");
    let worst = scan.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if worst - best_c <= FLAT_RTOL * worst.abs() {
        return BandOptimum {
            angle: best_t,
            cost: best_c,
            flat: true,
        };
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = scan[best_i.saturating_sub(1)].0;
    let mut b = scan[(best_i + 1).min(PRESCAN_POINTS - 1)].0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while b - a > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cost(d);
        }
    }
    let t = 0.5 * (a + b);
    let ft = cost(t);
    let (angle, value) = if ft <= best_c { (t, ft) } else { (best_t, best_c) };
    BandOptimum {
        angle,
        cost: value,
        flat: false,
    }
}

/// Optimal fixed injection angle for a pure squeezed state of factor `r`.
pub fn optimize_band_angle(
    cfg: &InterferometerConfig,
    r: f64,
    obj: &BandObjective,
    grid: &FrequencyGrid,
) -> Result<BandOptimum> {
    optimize_band_angle_injected(cfg, InjectedVariances::pure(r)?, obj, grid)
}

/// As [`optimize_band_angle`] for an arbitrary (possibly lossy) injected state.
pub fn optimize_band_angle_injected(
    cfg: &InterferometerConfig,
    injected: InjectedVariances,
    obj: &BandObjective,
    grid: &FrequencyGrid,
) -> Result<BandOptimum> {
    let cost = BandCost::new(cfg, injected, obj, grid)?;
    let opt = minimize_angle(|t| cost.eval(t));
    if !opt.cost.is_finite() {
        return Err(Error::NoConvergence("band angle optimisation"));
    }
    Ok(opt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::C;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    fn cfg_with_sql(f0: f64) -> InterferometerConfig {
        InterferometerConfig::with_sql_frequency(40.0, 4000.0, C / 1064e-9, 450.0, f0).unwrap()
    }

    /// Positive root of f⁴ + γ²f² − A = 0.
    fn closed_form_f_sql(cfg: &InterferometerConfig) -> f64 {
        let g2 = cfg.bandwidth * cfg.bandwidth;
        let a = cfg.kimble_scale();
        (2.0 * a / (g2 + (g2 * g2 + 4.0 * a).sqrt())).sqrt()
    }

    #[test]
    fn constructed_root() {
        let cfg = cfg_with_sql(100.0);
        let f = find_f_sql(&cfg).unwrap();
        assert_relative_eq!(f, 100.0, max_relative = 1e-10);
        assert_relative_eq!(f, closed_form_f_sql(&cfg), max_relative = 1e-12);
    }

    #[test]
    fn more_power_raises_f_sql() {
        let cfg = cfg_with_sql(30.0);
        let mut hot = cfg;
        hot.arm_power *= 2.0;
        assert!(find_f_sql(&hot).unwrap() > find_f_sql(&cfg).unwrap());
    }

    #[test]
    fn single_frequency_angles() {
        let cfg = cfg_with_sql(30.0);
        let f = find_f_sql(&cfg).unwrap();
        assert!((optimal_angle_at(&cfg, f).unwrap() - FRAC_PI_4).abs() < 1e-10);
        assert!(optimal_angle_at(&cfg, 1e4).unwrap() < 1e-4);
        assert!(optimal_angle_at(&cfg, 0.1).unwrap() > FRAC_PI_2 - 1e-4);
    }

    #[test]
    fn single_bin_band_at_f_sql() {
        let cfg = cfg_with_sql(30.0);
        let grid = FrequencyGrid::new(vec![10.0, 30.0, 100.0]).unwrap();
        let obj = BandObjective::new(29.0, 31.0, Weighting::Flat).unwrap();
        let opt = optimize_band_angle(&cfg, 1.0, &obj, &grid).unwrap();
        assert!((opt.angle - FRAC_PI_4).abs() < 1e-4, "{}", opt.angle);
        assert!(!opt.flat);
    }

    #[test]
    fn no_squeezing_is_flat() {
        let cfg = cfg_with_sql(30.0);
        let grid = FrequencyGrid::log(10.0, 100.0, 30).unwrap();
        let obj = BandObjective::new(20.0, 60.0, Weighting::Flat).unwrap();
        let opt = optimize_band_angle(&cfg, 0.0, &obj, &grid).unwrap();
        assert!(opt.flat);
        assert_eq!(opt.angle, 0.0);
    }

    #[test]
    fn beats_reference_angles() {
        let cfg = cfg_with_sql(30.0);
        let grid = FrequencyGrid::log(10.0, 1000.0, 200).unwrap();
        for weighting in [Weighting::Flat, Weighting::InverseSql] {
            let obj = BandObjective::new(25.0, 80.0, weighting).unwrap();
            let cost = BandCost::new(&cfg, InjectedVariances::pure(1.2).unwrap(), &obj, &grid).unwrap();
            let opt = optimize_band_angle(&cfg, 1.2, &obj, &grid).unwrap();
            let centre = optimal_angle_at(&cfg, obj.center()).unwrap();
            assert!(opt.cost <= cost.eval(0.0));
            assert!(opt.cost <= cost.eval(centre));
            // brute force, 1000 points
            let brute = (0..=1000)
                .map(|i| cost.eval(FRAC_PI_2 * i as f64 / 1000.0))
                .fold(f64::INFINITY, f64::min);
            assert!(opt.cost <= brute * (1.0 + 1e-6));
        }
    }

    #[test]
    fn band_errors() {
        let cfg = cfg_with_sql(30.0);
        let grid = FrequencyGrid::log(10.0, 100.0, 30).unwrap();
        let obj = BandObjective::new(50.0, 500.0, Weighting::Flat).unwrap();
        assert!(matches!(
            optimize_band_angle(&cfg, 1.0, &obj, &grid),
            Err(Error::BandOutsideGrid { .. })
        ));
        assert!(BandObjective::new(50.0, 50.0, Weighting::Flat).is_err());
        assert!(BandObjective::new(0.0, 50.0, Weighting::Flat).is_err());
    }
}

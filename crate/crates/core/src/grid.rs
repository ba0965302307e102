//! Fourier-frequency grids.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Strictly increasing list of positive Fourier frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    points: Vec<f64>,
}

impl TryFrom<RawGrid> for FrequencyGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        FrequencyGrid::new(raw.points)
    }
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid", "must contain at least one point"));
        }
        for &f in &points {
            ensure_positive("grid point", f)?;
        }
        if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "grid",
                format!("points must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        Ok(Self { points })
    }

    /// `n` logarithmically spaced points from `f_min` to `f_max`, endpoints exact.
    pub fn log(f_min: f64, f_max: f64, n: usize) -> Result<Self> {
        ensure_positive("f_min", f_min)?;
        ensure_positive("f_max", f_max)?;
        if f_max <= f_min {
            return Err(Error::invalid(
                "f_max",
                format!("must exceed f_min ({f_max} <= {f_min})"),
            ));
        }
        if n < 2 {
            return Err(Error::invalid("n", format!("need at least 2 points, got {n}")));
        }
        let (lo, hi) = (f_min.log10(), f_max.log10());
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n)
            .map(|i| 10f64.powf(lo + step * i as f64))
            .collect();
        points[0] = f_min;
        points[n - 1] = f_max;
        Self::new(points)
    }

    /// Single-point grid.
    pub fn single(f: f64) -> Result<Self> {
        Self::new(vec![f])
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().copied()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Indices of the bins with `lo <= f <= hi`.
    ///
    /// The band must lie inside the grid span and contain at least one bin.
    pub fn band_indices(&self, lo: f64, hi: f64) -> Result<Range<usize>> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::invalid("band", format!("[{lo}, {hi}] is not an interval")));
        }
        if lo < self.first() || hi > self.last() {
            return Err(Error::BandOutsideGrid {
                lo,
                hi,
                grid_lo: self.first(),
                grid_hi: self.last(),
            });
        }
        let start = self.points.partition_point(|&f| f < lo);
        let end = self.points.partition_point(|&f| f <= hi);
        if start >= end {
            return Err(Error::EmptyBand { lo, hi });
        }
        Ok(start..end)
    }
}

impl<'a> IntoIterator for &'a FrequencyGrid {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Shorthand for [`FrequencyGrid::log`].
pub fn make_log_grid(f_min: f64, f_max: f64, n: usize) -> Result<FrequencyGrid> {
    FrequencyGrid::log(f_min, f_max, n)
}

use crate::error::{Error, Result};

/// Uniform binning of `[lower, upper]`; distributions are supported on bin centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreGrid {
    lower: f64,
    upper: f64,
    stepsize: f64,
    bins: usize,
}

impl ScoreGrid {
    /// Grid on `[0, 1]` with bin width `stepsize`, which must split the unit
    /// interval into a whole number of bins (within 1e-9).
    pub fn new(stepsize: f64) -> Result<Self> {
        if !(stepsize.is_finite() && stepsize > 0.0 && stepsize <= 1.0) {
            return Err(Error::InvalidGrid(stepsize));
        }
        let ratio = 1.0 / stepsize;
        let bins = ratio.round();
        if (ratio - bins).abs() > 1e-9 * bins.max(1.0) || bins < 1.0 {
            return Err(Error::InvalidGrid(stepsize));
        }
        Ok(Self { lower: 0.0, upper: 1.0, stepsize, bins: bins as usize })
    }

    /// Grid with `bins` equal bins on `[0, 1]`.
    pub fn with_bins(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidGrid(f64::INFINITY));
        }
        Ok(Self { lower: 0.0, upper: 1.0, stepsize: 1.0 / bins as f64, bins })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn stepsize(&self) -> f64 {
        self.stepsize
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.lower + (bin as f64 + 0.5) * (self.upper - self.lower) / self.bins as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins).map(|i| self.center(i)).collect()
    }

    /// Bin index of `score`; scores at (or numerically just below) a bin edge
    /// go to the upper bin, and `upper` itself falls into the last bin.
    /// Values outside the range are clamped.
    pub fn bin_of(&self, score: f64) -> usize {
        let scaled = (score - self.lower) / (self.upper - self.lower) * self.bins as f64;
        let idx = (scaled + 1e-9).floor();
        if idx <= 0.0 {
            0
        } else {
            (idx as usize).min(self.bins - 1)
        }
    }

    /// Snap a score to the center of its bin.
    pub fn snap(&self, score: f64) -> f64 {
        self.center(self.bin_of(score))
    }

    pub fn contains(&self, score: f64) -> bool {
        score >= self.lower && score <= self.upper
    }

    /// Two grids are interchangeable when they have the same bin count.
    pub(crate) fn check_same(&self, other: &ScoreGrid) -> Result<()> {
        if self.bins != other.bins {
            return Err(Error::GridMismatch(self.bins, other.bins));
        }
        Ok(())
    }
}

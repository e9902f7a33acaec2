use crate::error::{Error, Result};

use super::{ScoreGrid, MASS_TOLERANCE};

/// Whether a histogram holds probabilities or raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramForm {
    Normalized,
    Counts,
}

/// Discrete distribution over the bin centers of a [`ScoreGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreHistogram {
    grid: ScoreGrid,
    mass: Vec<f64>,
    form: HistogramForm,
}

impl ScoreHistogram {
    /// Normalized histogram from per-bin probabilities. The weights must be
    /// nonnegative and sum to one within [`MASS_TOLERANCE`].
    pub fn from_mass(grid: ScoreGrid, mass: Vec<f64>) -> Result<Self> {
        check_weights(&grid, &mass)?;
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { grid, mass, form: HistogramForm::Normalized })
    }

    /// Count-form histogram; call [`ScoreHistogram::normalized`] before using it
    /// with the transport operations.
    pub fn from_counts(grid: ScoreGrid, counts: Vec<f64>) -> Result<Self> {
        check_weights(&grid, &counts)?;
        Ok(Self { grid, mass: counts, form: HistogramForm::Counts })
    }

    /// Rescale to unit mass. Errors on an all-zero histogram.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let mass = self.mass.iter().map(|m| m / total).collect();
        Ok(Self { grid: self.grid, mass, form: HistogramForm::Normalized })
    }

    /// Point mass on one bin.
    pub fn point_mass(grid: ScoreGrid, bin: usize) -> Self {
        let mut mass = vec![0.0; grid.bins()];
        mass[bin.min(grid.bins() - 1)] = 1.0;
        Self { grid, mass, form: HistogramForm::Normalized }
    }

    pub fn grid(&self) -> &ScoreGrid {
        &self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn form(&self) -> HistogramForm {
        self.form
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.iter().all(|&m| m == 0.0)
    }

    pub fn mean(&self) -> f64 {
        let total = self.total();
        self.mass.iter().enumerate().map(|(i, m)| m * self.grid.center(i)).sum::<f64>() / total
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.form != HistogramForm::Normalized {
            return Err(Error::NotNormalized(self.total()));
        }
        Ok(())
    }

    /// Cumulative distribution rescaled so the last positive bin reaches
    /// exactly 1.0.
    pub(crate) fn cumulative(&self) -> Vec<f64> {
        let total = self.total();
        let mut acc = 0.0;
        let mut cum: Vec<f64> = self
            .mass
            .iter()
            .map(|m| {
                acc += m;
                acc / total
            })
            .collect();
        if let Some(last) = self.mass.iter().rposition(|&m| m > 0.0) {
            for c in &mut cum[last..] {
                *c = 1.0;
            }
        }
        cum
    }

    /// Left-continuous quantile: the bin center of the first bin whose
    /// cumulative mass reaches `level`.
    pub fn quantile(&self, level: f64) -> f64 {
        let cum = self.cumulative();
        let idx = cum.partition_point(|&c| c < level).min(cum.len() - 1);
        self.grid.center(idx)
    }
}

fn check_weights(grid: &ScoreGrid, mass: &[f64]) -> Result<()> {
    if mass.len() != grid.bins() {
        return Err(Error::BinCount { expected: grid.bins(), got: mass.len() });
    }
    if let Some(&bad) = mass.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::InvalidMass(bad));
    }
    Ok(())
}

/// Normalized histogram of scores already in `[0, 1]`.
pub fn histogram_from_scores(scores: &[f64], grid: &ScoreGrid) -> Result<ScoreHistogram> {
    if scores.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut counts = vec![0.0; grid.bins()];
    for &s in scores {
        if !grid.contains(s) {
            return Err(Error::UnnormalizedInput(s));
        }
        counts[grid.bin_of(s)] += 1.0;
    }
    ScoreHistogram::from_counts(*grid, counts)?.normalized()
}

/// Segments `(source bin, target bin, mass)` of the monotone coupling, in
/// ascending order of cumulative level.
pub(crate) fn monotone_segments(a: &ScoreHistogram, b: &ScoreHistogram) -> Vec<(usize, usize, f64)> {
    let ca = a.cumulative();
    let cb = b.cumulative();
    let n = ca.len();
    let mut segments = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut pos = 0.0;
    loop {
        while i < n && ca[i] <= pos {
            i += 1;
        }
        while j < n && cb[j] <= pos {
            j += 1;
        }
        if i == n || j == n {
            break;
        }
        let next = ca[i].min(cb[j]);
        segments.push((i, j, next - pos));
        pos = next;
    }
    segments
}

pub(crate) fn check_pair(a: &ScoreHistogram, b: &ScoreHistogram) -> Result<()> {
    a.grid().check_same(b.grid())?;
    a.require_normalized()?;
    b.require_normalized()
}

/// Quadratic Wasserstein distance between two normalized histograms on the
/// same grid, exact for the piecewise-constant quantile functions.
pub fn wasserstein2(a: &ScoreHistogram, b: &ScoreHistogram) -> Result<f64> {
    check_pair(a, b)?;
    let grid = a.grid();
    let cost: f64 = monotone_segments(a, b)
        .into_iter()
        .map(|(i, j, m)| {
            let d = grid.center(i) - grid.center(j);
            m * d * d
        })
        .sum();
    Ok(cost.max(0.0).sqrt())
}

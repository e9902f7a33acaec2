use crate::error::{Error, Result};

use super::{ScoreHistogram, MASS_TOLERANCE};

/// Midpoint quantile levels `(k + 0.5) / Q` with `Q = max(1000, 10 * bins)`.
pub fn quantile_levels(bins: usize) -> Vec<f64> {
    let q = (10 * bins).max(1000);
    (0..q).map(|k| (k as f64 + 0.5) / q as f64).collect()
}

fn validate(dists: &[ScoreHistogram], weights: &[f64]) -> Result<()> {
    let first = dists.first().ok_or(Error::EmptyDistribution)?;
    if dists.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} distributions but {} weights",
            dists.len(),
            weights.len()
        )));
    }
    for d in dists {
        first.grid().check_same(d.grid())?;
        d.require_normalized()?;
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Weighted average of the input quantile functions, sampled at
/// [`quantile_levels`].
pub fn barycenter_quantiles(dists: &[ScoreHistogram], weights: &[f64]) -> Result<Vec<f64>> {
    validate(dists, weights)?;
    let grid = *dists[0].grid();
    let levels = quantile_levels(grid.bins());
    let mut averaged = vec![0.0; levels.len()];
    for (dist, &w) in dists.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let cum = dist.cumulative();
        let mut bin = 0;
        for (slot, &level) in averaged.iter_mut().zip(&levels) {
            while bin + 1 < cum.len() && cum[bin] < level {
                bin += 1;
            }
            *slot += w * grid.center(bin);
        }
    }
    Ok(averaged)
}

/// Wasserstein-2 barycenter of histograms on a common grid, by quantile
/// averaging followed by re-binning.
pub fn barycenter(dists: &[ScoreHistogram], weights: &[f64]) -> Result<ScoreHistogram> {
    let quantiles = barycenter_quantiles(dists, weights)?;
    let grid = *dists[0].grid();
    let mut counts = vec![0.0; grid.bins()];
    for q in &quantiles {
        counts[grid.bin_of(*q)] += 1.0;
    }
    ScoreHistogram::from_counts(grid, counts)?.normalized()
}

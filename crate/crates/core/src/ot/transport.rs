use crate::error::{Error, Result};

use super::histogram::{check_pair, monotone_segments};
use super::{ScoreGrid, ScoreHistogram};

/// Per-bin lookup from a raw score bin to a transported score.
///
/// Bins that carried no source mass when the map was fitted are undefined
/// and map to their own center.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMap {
    grid: ScoreGrid,
    target: Vec<f64>,
    defined: Vec<bool>,
}

impl TransportMap {
    pub fn identity(grid: ScoreGrid) -> Self {
        Self { target: grid.centers(), defined: vec![true; grid.bins()], grid }
    }

    /// Validates the map invariants: targets in `[0, 1]`, non-decreasing over
    /// defined bins, identity on undefined bins.
    pub fn from_parts(grid: ScoreGrid, target: Vec<f64>, defined: Vec<bool>) -> Result<Self> {
        if target.len() != grid.bins() || defined.len() != grid.bins() {
            return Err(Error::BinCount { expected: grid.bins(), got: target.len().min(defined.len()) });
        }
        if let Some(&bad) = target.iter().find(|t| !(t.is_finite() && grid.contains(**t))) {
            return Err(Error::UnnormalizedInput(bad));
        }
        let mut last = f64::NEG_INFINITY;
        for (i, (&t, &d)) in target.iter().zip(&defined).enumerate() {
            if d {
                if t < last {
                    return Err(Error::Config(format!("transport map decreases at bin {i}")));
                }
                last = t;
            } else if t != grid.center(i) {
                return Err(Error::Config(format!("undefined bin {i} is not mapped to itself")));
            }
        }
        Ok(Self { grid, target, defined })
    }

    pub fn grid(&self) -> &ScoreGrid {
        &self.grid
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn defined(&self) -> &[bool] {
        &self.defined
    }

    pub fn is_defined(&self, bin: usize) -> bool {
        self.defined[bin]
    }

    /// Transported score for a raw score; undefined bins return the bin center.
    pub fn map_score(&self, score: f64) -> f64 {
        self.target[self.grid.bin_of(score)]
    }

    pub fn is_monotone(&self) -> bool {
        let defined: Vec<f64> =
            self.target.iter().zip(&self.defined).filter(|(_, d)| **d).map(|(t, _)| *t).collect();
        defined.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Sparse coupling between the bins of two histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    grid: ScoreGrid,
    entries: Vec<(usize, usize, f64)>,
}

impl Coupling {
    /// `(source bin, target bin, mass)` triples, sorted by source then target.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Quadratic transport cost with bin centers as support points.
    pub fn cost(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, m)| {
                let d = self.grid.center(i) - self.grid.center(j);
                m * d * d
            })
            .sum()
    }
}

/// North-west corner coupling on the sorted supports; optimal for quadratic
/// cost on the line. Ties are consumed in ascending bin order.
pub fn monotone_coupling(source: &ScoreHistogram, target: &ScoreHistogram) -> Result<Coupling> {
    check_pair(source, target)?;
    if source.is_empty() || target.is_empty() {
        return Err(Error::ZeroMassSource);
    }
    Ok(Coupling { grid: *source.grid(), entries: monotone_segments(source, target) })
}

/// Optimal map from `source` to `target`, extracted from the monotone
/// coupling by barycentric projection.
pub fn optimal_transport_map(source: &ScoreHistogram, target: &ScoreHistogram) -> Result<TransportMap> {
    let coupling = monotone_coupling(source, target)?;
    let grid = *source.grid();
    let mut out = grid.centers();
    let mut defined = vec![false; grid.bins()];

    let entries = coupling.entries();
    let mut k = 0;
    while k < entries.len() {
        let src = entries[k].0;
        let start = k;
        while k < entries.len() && entries[k].0 == src {
            k += 1;
        }
        let run = &entries[start..k];
        if source.mass()[src] <= 0.0 {
            continue;
        }
        let total: f64 = run.iter().map(|e| e.2).sum();
        let mean = if run.len() == 1 {
            grid.center(run[0].1)
        } else {
            let weighted: f64 = run.iter().map(|e| e.2 * grid.center(e.1)).sum();
            // projection stays inside the hull of the bins it lands on
            (weighted / total).clamp(grid.center(run[0].1), grid.center(run[run.len() - 1].1))
        };
        out[src] = mean;
        defined[src] = true;
    }
    Ok(TransportMap { grid, target: out, defined })
}

/// Image of `source` under `map`, re-binned onto the grid.
pub fn push_forward(source: &ScoreHistogram, map: &TransportMap) -> Result<ScoreHistogram> {
    source.grid().check_same(map.grid())?;
    source.require_normalized()?;
    let grid = *source.grid();
    let mut counts = vec![0.0; grid.bins()];
    for (i, &m) in source.mass().iter().enumerate() {
        if m > 0.0 {
            counts[grid.bin_of(map.target[i])] += m;
        }
    }
    ScoreHistogram::from_counts(grid, counts)?.normalized()
}

/// Point on the Wasserstein geodesic from `a` (theta = 0) to `b` (theta = 1).
pub fn displacement_interpolate(a: &ScoreHistogram, b: &ScoreHistogram, theta: f64) -> Result<ScoreHistogram> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidInterpolation(theta));
    }
    let map = optimal_transport_map(a, b)?;
    let grid = *a.grid();
    let target = (0..grid.bins())
        .map(|i| {
            if map.defined[i] {
                (1.0 - theta) * grid.center(i) + theta * map.target[i]
            } else {
                grid.center(i)
            }
        })
        .collect();
    let interpolated = TransportMap { grid, target, defined: map.defined.clone() };
    push_forward(a, &interpolated)
}

use crate::datasets::GroupedDataset;
use crate::error::{Error, Result};

/// Determinant of the two-group incompatibility system plus the group base
/// rates it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incompatibility {
    pub determinant: f64,
    pub base_rates: [f64; 2],
}

impl Incompatibility {
    /// Calibration and both balance criteria can hold together only when the
    /// determinant vanishes.
    pub fn is_compatible(&self) -> bool {
        self.determinant == 0.0
    }
}

/// `(N1 - n1) * n2 - (N2 - n2) * n1` for group totals `N` and positives `n`.
pub fn incompatibility_determinant(n1_total: u64, n1_pos: u64, n2_total: u64, n2_pos: u64) -> Result<Incompatibility> {
    if n1_total == 0 || n2_total == 0 {
        return Err(Error::NonPositiveTotal);
    }
    for (positives, total) in [(n1_pos, n1_total), (n2_pos, n2_total)] {
        if positives > total {
            return Err(Error::PositivesExceedTotal { positives, total });
        }
    }
    let (big1, small1, big2, small2) = (n1_total as i128, n1_pos as i128, n2_total as i128, n2_pos as i128);
    let det = (big1 - small1) * small2 - (big2 - small2) * small1;
    Ok(Incompatibility {
        determinant: det as f64,
        base_rates: [n1_pos as f64 / n1_total as f64, n2_pos as f64 / n2_total as f64],
    })
}

/// Mean raw score of the negative and positive members of `group`; `None`
/// for an empty class.
pub fn class_mean_scores(dataset: &GroupedDataset, group: &str) -> (Option<f64>, Option<f64>) {
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    for r in dataset.members(group) {
        let k = r.positive as usize;
        sums[k] += r.raw_score;
        counts[k] += 1;
    }
    let mean = |k: usize| (counts[k] > 0).then(|| sums[k] / counts[k] as f64);
    (mean(0), mean(1))
}

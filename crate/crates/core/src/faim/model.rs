use std::collections::BTreeMap;

use crate::datasets::GroupedDataset;
use crate::error::{Error, Result};
use crate::ot::{ScoreGrid, ScoreHistogram, TransportMap};

use super::ThetaWeights;

/// Fitted state for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupModel {
    pub group: String,
    /// Raw score distribution.
    pub nu: ScoreHistogram,
    pub lambda_pos: Vec<f64>,
    pub mu_a: ScoreHistogram,
    /// Absent when no group puts weight on negative-class balance.
    pub mu_b: Option<ScoreHistogram>,
    /// Absent when no group puts weight on positive-class balance.
    pub mu_c: Option<ScoreHistogram>,
    pub mu_bar: ScoreHistogram,
    pub final_map: TransportMap,
    pub n_total: u64,
    pub n_positive: u64,
}

impl GroupModel {
    pub fn base_rate(&self) -> f64 {
        self.n_positive as f64 / self.n_total as f64
    }
}

/// Immutable result of [`fit`](super::fit); safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FaimModel {
    grid: ScoreGrid,
    groups: BTreeMap<String, GroupModel>,
    thetas: BTreeMap<String, ThetaWeights>,
}

impl FaimModel {
    pub(crate) fn new(
        grid: ScoreGrid,
        groups: BTreeMap<String, GroupModel>,
        thetas: BTreeMap<String, ThetaWeights>,
    ) -> Result<Self> {
        for g in thetas.keys() {
            if !groups.contains_key(g) {
                return Err(Error::UnknownGroup(g.clone()));
            }
        }
        for (label, m) in &groups {
            if !thetas.contains_key(label) {
                return Err(Error::MissingTheta(label.clone()));
            }
            if m.n_positive > m.n_total {
                return Err(Error::PositivesExceedTotal { positives: m.n_positive, total: m.n_total });
            }
            let hists = [Some(&m.nu), Some(&m.mu_a), m.mu_b.as_ref(), m.mu_c.as_ref(), Some(&m.mu_bar)];
            for h in hists.into_iter().flatten() {
                grid.check_same(h.grid())?;
            }
            grid.check_same(m.final_map.grid())?;
            if m.lambda_pos.len() != grid.bins() {
                return Err(Error::BinCount { expected: grid.bins(), got: m.lambda_pos.len() });
            }
        }
        Ok(Self { grid, groups, thetas })
    }

    pub fn grid(&self) -> &ScoreGrid {
        &self.grid
    }

    pub fn groups(&self) -> impl Iterator<Item = &GroupModel> {
        self.groups.values()
    }

    pub fn group(&self, label: &str) -> Result<&GroupModel> {
        self.groups.get(label).ok_or_else(|| Error::UnknownGroup(label.to_string()))
    }

    pub fn thetas(&self) -> &BTreeMap<String, ThetaWeights> {
        &self.thetas
    }

    pub fn theta(&self, label: &str) -> Result<ThetaWeights> {
        self.thetas.get(label).copied().ok_or_else(|| Error::UnknownGroup(label.to_string()))
    }

    /// Fair scores for every record of `dataset`, in record order.
    pub fn apply_dataset(&self, dataset: &GroupedDataset) -> Result<Vec<f64>> {
        dataset.records().iter().map(|r| apply(self, &r.group, r.raw_score)).collect()
    }
}

/// Fair score for one individual. The raw score is snapped to the model grid;
/// bins that held no training mass keep the snapped raw score.
pub fn apply(model: &FaimModel, group: &str, raw_score: f64) -> Result<f64> {
    if !(raw_score.is_finite() && model.grid.contains(raw_score)) {
        return Err(Error::UnnormalizedInput(raw_score));
    }
    let map = &model.group(group)?.final_map;
    let bin = model.grid.bin_of(raw_score);
    Ok(if map.is_defined(bin) { map.target()[bin] } else { model.grid.center(bin) })
}

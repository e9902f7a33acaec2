//! Grouped score datasets: ingestion, normalization, and the two experiment
//! sources (a seeded bivariate-normal generator and the Broward County COMPAS
//! export).

mod compas;
mod csv_io;
mod synthetic;

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::ot::ScoreGrid;

pub use compas::{
    decile_to_score, prepare_compas, prepare_compas_reader, score_to_decile, CompasDimension,
    COMPAS_HIGH_RISK_THRESHOLD, COMPAS_STEPSIZE,
};
pub use csv_io::{
    load_csv, load_csv_reader, load_scored_csv, write_dataset_csv, write_true_scores_csv, CsvSchema,
    ScoredRecord,
};
pub use synthetic::{
    generate_synthetic, SyntheticConfig, SyntheticData, TrueScoreRow, ADVANTAGED_GROUP,
    DISADVANTAGED_GROUP,
};

/// One individual: opaque id, group label, score in `[0, 1]`, ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub group: String,
    pub raw_score: f64,
    pub positive: bool,
}

/// Validated collection of records: non-empty, unique ids, scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDataset {
    records: Vec<Record>,
}

impl GroupedDataset {
    pub fn new(records: Vec<Record>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !(r.raw_score.is_finite() && (0.0..=1.0).contains(&r.raw_score)) {
                return Err(Error::UnnormalizedInput(r.raw_score));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Group labels in sorted order.
    pub fn groups(&self) -> Vec<String> {
        let mut groups: Vec<String> = self.group_sizes().into_keys().collect();
        groups.sort();
        groups
    }

    pub fn group_sizes(&self) -> BTreeMap<String, usize> {
        let mut sizes = BTreeMap::new();
        for r in &self.records {
            *sizes.entry(r.group.clone()).or_insert(0) += 1;
        }
        sizes
    }

    pub fn members<'a>(&'a self, group: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.group == group)
    }

    /// `(N_t, n_t)`: group size and number of truly positive members.
    pub fn group_counts(&self, group: &str) -> (u64, u64) {
        self.members(group).fold((0, 0), |(n, p), r| (n + 1, p + r.positive as u64))
    }

    /// Dataset restricted to the given groups.
    pub fn subset(&self, groups: &[&str]) -> Result<Self> {
        Self::new(self.records.iter().filter(|r| groups.contains(&r.group.as_str())).cloned().collect())
    }
}

/// Min-max rescaling onto `[0, 1]`; a constant input maps to 0.5.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| ((v - lo) / range).clamp(0.0, 1.0)).collect()
}

/// Optionally min-max normalize, then snap every score to its bin center.
pub fn truncate_scores(scores: &[f64], grid: &ScoreGrid, normalize: bool) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let normalized;
    let values = if normalize {
        normalized = min_max_normalize(scores);
        &normalized
    } else {
        if let Some(&bad) = scores.iter().find(|s| !(s.is_finite() && grid.contains(**s))) {
            return Err(Error::UnnormalizedInput(bad));
        }
        scores
    };
    Ok(values.iter().map(|&s| grid.snap(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, group: &str, score: f64, positive: bool) -> Record {
        Record { id: id.into(), group: group.into(), raw_score: score, positive }
    }

    #[test]
    fn dataset_invariants() {
        assert!(matches!(GroupedDataset::new(vec![]), Err(Error::EmptyDataset)));
        assert!(matches!(
            GroupedDataset::new(vec![rec("1", "a", 0.5, true), rec("1", "b", 0.5, false)]),
            Err(Error::DuplicateId(_))
        ));
        assert!(GroupedDataset::new(vec![rec("1", "a", 1.2, true)]).is_err());
        let ds = GroupedDataset::new(vec![
            rec("1", "b", 0.1, true),
            rec("2", "a", 0.2, false),
            rec("3", "b", 0.3, false),
        ])
        .unwrap();
        assert_eq!(ds.groups(), vec!["a", "b"]);
        assert_eq!(ds.group_counts("b"), (2, 1));
    }

    #[test]
    fn truncation_examples() {
        let g = ScoreGrid::new(0.5).unwrap();
        assert_eq!(truncate_scores(&[0.0, 0.5, 1.0], &g, false).unwrap(), vec![0.25, 0.75, 0.75]);
        let g = ScoreGrid::new(0.01).unwrap();
        let t = truncate_scores(&[10.0, 20.0, 30.0], &g, true).unwrap();
        assert_eq!(t, vec![g.snap(0.0), g.snap(0.5), g.snap(1.0)]);
        assert_eq!(truncate_scores(&[3.0, 3.0], &g, true).unwrap(), vec![g.snap(0.5); 2]);
        assert_eq!(min_max_normalize(&[7.0, 7.0, 7.0]), vec![0.5; 3]);
        assert!(truncate_scores(&[], &g, true).is_err());
        assert!(truncate_scores(&[1.5], &g, false).is_err());
    }

    #[test]
    fn truncation_is_idempotent() {
        let g = ScoreGrid::new(0.01).unwrap();
        let once = truncate_scores(&[0.0, 0.123, 0.5, 0.999, 1.0], &g, false).unwrap();
        let twice = truncate_scores(&once, &g, false).unwrap();
        assert_eq!(once, twice);
    }
}

//! Threshold classification metrics per group and overall, before/after
//! deltas, and per-score-bin slicing.

mod export;

use std::collections::BTreeMap;

use crate::datasets::{GroupedDataset, ScoredRecord};
use crate::error::{Error, Result};
use crate::ot::ScoreGrid;

pub use export::{format_table, write_per_score_csv, write_report_csv};

/// Name of the scope that aggregates every record.
pub const OVERALL: &str = "overall";

/// One individual as seen by the evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub group: String,
    /// Score used for slicing in [`per_score_report`].
    pub raw_score: f64,
    /// Score compared against the threshold.
    pub score: f64,
    pub positive: bool,
}

impl From<&ScoredRecord> for Outcome {
    fn from(r: &ScoredRecord) -> Self {
        Self {
            group: r.record.group.clone(),
            raw_score: r.record.raw_score,
            score: r.prediction_score(),
            positive: r.record.positive,
        }
    }
}

/// Outcomes for `dataset` with `scores` as predictions; raw scores when `None`.
pub fn outcomes(dataset: &GroupedDataset, scores: Option<&[f64]>) -> Result<Vec<Outcome>> {
    if let Some(s) = scores {
        if s.len() != dataset.len() {
            return Err(Error::Config(format!("{} scores for {} records", s.len(), dataset.len())));
        }
    }
    Ok(dataset
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| Outcome {
            group: r.group.clone(),
            raw_score: r.raw_score,
            score: scores.map_or(r.raw_score, |s| s[i]),
            positive: r.positive,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl Confusion {
    fn add(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn actual_positive(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn actual_negative(&self) -> u64 {
        self.fp + self.tn
    }

    pub fn predicted_positive(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn fpr(&self) -> Option<f64> {
        ratio(self.fp, self.actual_negative())
    }

    pub fn fnr(&self) -> Option<f64> {
        ratio(self.fn_, self.actual_positive())
    }

    pub fn positive_rate(&self) -> f64 {
        self.predicted_positive() as f64 / self.total() as f64
    }

    /// Per-class precision averaged with class-support weights. A class that is
    /// never predicted counts as precision 1.
    pub fn weighted_precision(&self) -> f64 {
        let total = self.total() as f64;
        let pos = ratio(self.tp, self.tp + self.fp).unwrap_or(1.0);
        let neg = ratio(self.tn, self.tn + self.fn_).unwrap_or(1.0);
        (self.actual_positive() as f64 * pos + self.actual_negative() as f64 * neg) / total
    }

    /// Per-class recall averaged with class-support weights; equal to accuracy.
    pub fn weighted_recall(&self) -> f64 {
        let total = self.total() as f64;
        let pos = ratio(self.tp, self.actual_positive()).unwrap_or(0.0);
        let neg = ratio(self.tn, self.actual_negative()).unwrap_or(0.0);
        (self.actual_positive() as f64 * pos + self.actual_negative() as f64 * neg) / total
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Metric changes against a baseline; `None` where either side is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDeltas {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScopeMetrics {
    pub scope: String,
    pub confusion: Confusion,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
    pub delta: Option<MetricDeltas>,
}

impl ScopeMetrics {
    fn from_confusion(scope: String, confusion: Confusion) -> Self {
        Self {
            scope,
            accuracy: confusion.accuracy(),
            precision: confusion.weighted_precision(),
            recall: confusion.weighted_recall(),
            fpr: confusion.fpr(),
            fnr: confusion.fnr(),
            confusion,
            delta: None,
        }
    }

    pub fn positive_rate(&self) -> f64 {
        self.confusion.positive_rate()
    }
}

/// Positive-prediction rate of one group relative to another.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRatio {
    pub numerator: String,
    pub denominator: String,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Overall scope first, then groups in label order.
    pub rows: Vec<ScopeMetrics>,
    /// Every ordered pair of distinct groups.
    pub ratios: Vec<RateRatio>,
}

impl EvaluationReport {
    pub fn scope(&self, name: &str) -> Result<&ScopeMetrics> {
        self.rows.iter().find(|r| r.scope == name).ok_or_else(|| Error::ScopeMismatch(format!("no scope {name:?}")))
    }

    pub fn overall(&self) -> &ScopeMetrics {
        &self.rows[0]
    }

    pub fn ratio(&self, numerator: &str, denominator: &str) -> Option<f64> {
        self.ratios.iter().find(|r| r.numerator == numerator && r.denominator == denominator).and_then(|r| r.ratio)
    }
}

/// Predicted positive iff `score >= threshold`.
pub fn confusion_metrics(outcomes: &[Outcome], threshold: f64) -> Result<EvaluationReport> {
    if outcomes.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Config(format!("threshold {threshold} outside [0, 1]")));
    }
    let mut overall = Confusion::default();
    let mut by_group: BTreeMap<&str, Confusion> = BTreeMap::new();
    for o in outcomes {
        let predicted = o.score >= threshold;
        overall.add(predicted, o.positive);
        by_group.entry(&o.group).or_default().add(predicted, o.positive);
    }
    let mut rows = vec![ScopeMetrics::from_confusion(OVERALL.to_string(), overall)];
    rows.extend(by_group.iter().map(|(g, c)| ScopeMetrics::from_confusion(g.to_string(), *c)));

    let mut ratios = Vec::new();
    for a in &rows[1..] {
        for b in &rows[1..] {
            if a.scope != b.scope {
                ratios.push(RateRatio {
                    numerator: a.scope.clone(),
                    denominator: b.scope.clone(),
                    ratio: positive_rate_ratio(a, b).ok(),
                });
            }
        }
    }
    Ok(EvaluationReport { rows, ratios })
}

/// `after` annotated with per-cell differences `after - before`.
pub fn delta_report(after: &EvaluationReport, before: &EvaluationReport) -> Result<EvaluationReport> {
    let names = |r: &EvaluationReport| r.rows.iter().map(|s| s.scope.clone()).collect::<Vec<_>>();
    if names(after) != names(before) {
        return Err(Error::ScopeMismatch(format!("{:?} vs {:?}", names(after), names(before))));
    }
    let diff = |a: Option<f64>, b: Option<f64>| Some(a? - b?);
    let mut out = after.clone();
    for (row, base) in out.rows.iter_mut().zip(&before.rows) {
        row.delta = Some(MetricDeltas {
            accuracy: row.accuracy - base.accuracy,
            precision: row.precision - base.precision,
            recall: row.recall - base.recall,
            fpr: diff(row.fpr, base.fpr),
            fnr: diff(row.fnr, base.fnr),
        });
    }
    Ok(out)
}

pub fn positive_rate_ratio(a: &ScopeMetrics, b: &ScopeMetrics) -> Result<f64> {
    let (num, den) = (a.positive_rate(), b.positive_rate());
    if den == 0.0 {
        return Err(Error::Undefined(format!("scope {:?} has no predicted positives", b.scope)));
    }
    Ok(num / den)
}

/// One report per raw-score bin that holds at least one outcome.
pub fn per_score_report(outcomes: &[Outcome], grid: &ScoreGrid, threshold: f64) -> Result<Vec<(usize, EvaluationReport)>> {
    if outcomes.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut bins: BTreeMap<usize, Vec<Outcome>> = BTreeMap::new();
    for o in outcomes {
        bins.entry(grid.bin_of(o.raw_score)).or_default().push(o.clone());
    }
    bins.into_iter().map(|(b, slice)| Ok((b, confusion_metrics(&slice, threshold)?))).collect()
}

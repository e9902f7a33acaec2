use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::{min_max_normalize, GroupedDataset, Record};

/// Label of the group whose scores the synthetic model overestimates.
pub const ADVANTAGED_GROUP: &str = "blue";
/// Label of the group whose scores the synthetic model underestimates.
pub const DISADVANTAGED_GROUP: &str = "orange";

/// Two groups drawn with equal probability; within each group the
/// `(true, predicted)` score pair is bivariate normal with a shared
/// covariance. Index 0 of each mean pair is the advantaged group.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n: usize,
    pub true_means: [f64; 2],
    pub predicted_means: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    pub threshold: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            true_means: [1.0, -1.0],
            predicted_means: [2.0, -3.0],
            covariance: [[1.0, 0.8], [0.8, 1.0]],
            threshold: 0.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrueScoreRow {
    pub id: String,
    pub group: String,
    pub true_score: f64,
    pub predicted_score: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: GroupedDataset,
    pub true_scores: Vec<TrueScoreRow>,
    /// The decision threshold mapped through the same min-max rescaling as
    /// the predicted scores. Raw scores at or above it are predicted positive.
    pub normalized_threshold: f64,
}

fn cholesky(cov: &[[f64; 2]; 2]) -> Result<[f64; 3]> {
    let [[a, b], [c, d]] = *cov;
    if (b - c).abs() > 1e-12 {
        return Err(Error::InvalidCovariance("matrix is not symmetric".into()));
    }
    if !(a > 0.0 && a * d - b * b > 0.0) {
        return Err(Error::InvalidCovariance("matrix is not positive definite".into()));
    }
    let l11 = a.sqrt();
    let l21 = b / l11;
    let l22 = (d - l21 * l21).sqrt();
    Ok([l11, l21, l22])
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticData> {
    if config.n == 0 {
        return Err(Error::EmptyDataset);
    }
    let [l11, l21, l22] = cholesky(&config.covariance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut true_scores = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let g = if rng.gen_bool(0.5) { 0 } else { 1 };
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        true_scores.push(TrueScoreRow {
            id: i.to_string(),
            group: [ADVANTAGED_GROUP, DISADVANTAGED_GROUP][g].to_string(),
            true_score: config.true_means[g] + l11 * z1,
            predicted_score: config.predicted_means[g] + l21 * z1 + l22 * z2,
        });
    }

    let predicted: Vec<f64> = true_scores.iter().map(|r| r.predicted_score).collect();
    let (lo, hi) = predicted
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let normalized_threshold = if hi > lo { (config.threshold - lo) / (hi - lo) } else { 0.5 };

    let records = true_scores
        .iter()
        .zip(min_max_normalize(&predicted))
        .map(|(row, raw_score)| Record {
            id: row.id.clone(),
            group: row.group.clone(),
            raw_score,
            positive: row.true_score > config.threshold,
        })
        .collect();

    Ok(SyntheticData { dataset: GroupedDataset::new(records)?, true_scores, normalized_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_individuals() {
        let cfg = SyntheticConfig { n: 0, ..Default::default() };
        assert!(matches!(generate_synthetic(&cfg), Err(Error::EmptyDataset)));
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let cfg = SyntheticConfig { n: 10, covariance: [[1.0, 2.0], [2.0, 1.0]], ..Default::default() };
        assert!(generate_synthetic(&cfg).is_err());
        let cfg = SyntheticConfig { n: 10, covariance: [[1.0, 0.5], [0.4, 1.0]], ..Default::default() };
        assert!(generate_synthetic(&cfg).is_err());
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = SyntheticConfig { n: 500, seed: 7, ..Default::default() };
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.true_scores, b.true_scores);
        let c = generate_synthetic(&SyntheticConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn threshold_above_all_samples_gives_no_positives() {
        let cfg = SyntheticConfig { n: 2000, threshold: 1e6, ..Default::default() };
        let data = generate_synthetic(&cfg).unwrap();
        assert!(data.dataset.records().iter().all(|r| !r.positive));
        assert!(data.normalized_threshold > 1.0);
    }

    #[test]
    fn normalized_threshold_separates_predictions() {
        let data = generate_synthetic(&SyntheticConfig { n: 3000, ..Default::default() }).unwrap();
        for (row, rec) in data.true_scores.iter().zip(data.dataset.records()) {
            if (row.predicted_score).abs() > 1e-9 {
                assert_eq!(row.predicted_score > 0.0, rec.raw_score >= data.normalized_threshold);
            }
        }
    }
}

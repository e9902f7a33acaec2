use std::collections::{BTreeMap, BTreeSet};

use crate::datasets::GroupedDataset;
use crate::error::{Error, Result};
use crate::ot::{barycenter, optimal_transport_map, ScoreGrid, ScoreHistogram, TransportMap};

use super::model::{FaimModel, GroupModel};
use super::{ScoreClass, ThetaWeights};

/// Per-bin positive rates of one group and the resulting calibrated
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Fraction of truly positive members per raw score bin; bins without
    /// members carry the group base rate.
    pub lambda_pos: Vec<f64>,
    pub mu_a: ScoreHistogram,
}

/// Shared class-conditional barycenter and the per-group maps onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceTarget {
    pub class: ScoreClass,
    pub barycenter: ScoreHistogram,
    /// Per group: map of the class-conditional raw distribution onto the
    /// barycenter, and the full-group distribution after moving only the
    /// class members through it.
    pub groups: BTreeMap<String, (TransportMap, ScoreHistogram)>,
}

/// `(bin, positive)` for every member of `group`.
fn member_bins(dataset: &GroupedDataset, grid: &ScoreGrid, group: &str) -> Result<Vec<(usize, bool)>> {
    let bins: Vec<(usize, bool)> = dataset.members(group).map(|r| (grid.bin_of(r.raw_score), r.positive)).collect();
    if bins.is_empty() {
        return Err(Error::EmptyGroup(group.to_string()));
    }
    Ok(bins)
}

fn counts_histogram(grid: &ScoreGrid, counts: Vec<f64>) -> Result<ScoreHistogram> {
    ScoreHistogram::from_counts(*grid, counts)?.normalized()
}

pub fn fit_calibration(dataset: &GroupedDataset, grid: &ScoreGrid, group: &str) -> Result<Calibration> {
    let bins = member_bins(dataset, grid, group)?;
    let mut members = vec![0.0; grid.bins()];
    let mut positives = vec![0.0; grid.bins()];
    for &(b, pos) in &bins {
        members[b] += 1.0;
        if pos {
            positives[b] += 1.0;
        }
    }
    let base_rate = positives.iter().sum::<f64>() / bins.len() as f64;
    let lambda_pos: Vec<f64> = members
        .iter()
        .zip(&positives)
        .map(|(&m, &p)| if m > 0.0 { p / m } else { base_rate })
        .collect();

    let mut calibrated = vec![0.0; grid.bins()];
    for (b, &m) in members.iter().enumerate() {
        if m > 0.0 {
            calibrated[grid.bin_of(lambda_pos[b])] += m;
        }
    }
    Ok(Calibration { lambda_pos, mu_a: counts_histogram(grid, calibrated)? })
}

pub fn conditional_distribution(
    dataset: &GroupedDataset,
    grid: &ScoreGrid,
    group: &str,
    class: ScoreClass,
) -> Result<ScoreHistogram> {
    let bins = member_bins(dataset, grid, group)?;
    let mut counts = vec![0.0; grid.bins()];
    for &(b, pos) in &bins {
        if class.matches(pos) {
            counts[b] += 1.0;
        }
    }
    counts_histogram(grid, counts)
        .map_err(|_| Error::DegenerateClass { class, groups: vec![group.to_string()] })
}

/// Balance target over every group of the dataset.
pub fn fit_balance_target(dataset: &GroupedDataset, grid: &ScoreGrid, class: ScoreClass) -> Result<BalanceTarget> {
    let all: BTreeSet<String> = dataset.groups().into_iter().collect();
    balance_target_for(dataset, grid, class, &all)
}

/// Groups in `required` must contain the class; other groups lacking it are
/// left out of the barycenter and get no target.
fn balance_target_for(
    dataset: &GroupedDataset,
    grid: &ScoreGrid,
    class: ScoreClass,
    required: &BTreeSet<String>,
) -> Result<BalanceTarget> {
    let sizes = dataset.group_sizes();
    let mut conditionals = BTreeMap::new();
    let mut degenerate = Vec::new();
    for group in sizes.keys() {
        match conditional_distribution(dataset, grid, group, class) {
            Ok(h) => {
                conditionals.insert(group.clone(), h);
            }
            Err(Error::DegenerateClass { .. }) if !required.contains(group) => {}
            Err(Error::DegenerateClass { .. }) => degenerate.push(group.clone()),
            Err(e) => return Err(e),
        }
    }
    if !degenerate.is_empty() {
        return Err(Error::DegenerateClass { class, groups: degenerate });
    }
    if conditionals.is_empty() {
        return Err(Error::DegenerateClass { class, groups: sizes.keys().cloned().collect() });
    }

    let total = conditionals.keys().map(|g| sizes[g]).sum::<usize>() as f64;
    let weights: Vec<f64> = conditionals.keys().map(|g| sizes[g] as f64 / total).collect();
    let dists: Vec<ScoreHistogram> = conditionals.values().cloned().collect();
    let shared = barycenter(&dists, &renormalized(weights))?;

    let mut groups = BTreeMap::new();
    for (group, sigma) in &conditionals {
        let map = optimal_transport_map(sigma, &shared)?;
        let mut counts = vec![0.0; grid.bins()];
        for (b, pos) in member_bins(dataset, grid, group)? {
            let dest = if class.matches(pos) { grid.bin_of(map.target()[b]) } else { b };
            counts[dest] += 1.0;
        }
        groups.insert(group.clone(), (map, counts_histogram(grid, counts)?));
    }
    Ok(BalanceTarget { class, barycenter: shared, groups })
}

/// Absorb the rounding residue of population shares into the largest weight.
fn renormalized(mut weights: Vec<f64>) -> Vec<f64> {
    let residue = 1.0 - weights.iter().sum::<f64>();
    if let Some(max) = weights.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *max += residue;
    }
    weights
}

/// Fit per-group fair maps for the given weights.
pub fn fit(
    dataset: &GroupedDataset,
    grid: &ScoreGrid,
    thetas: &BTreeMap<String, ThetaWeights>,
) -> Result<FaimModel> {
    let groups = dataset.groups();
    if let Some(missing) = groups.iter().find(|g| !thetas.contains_key(*g)) {
        return Err(Error::MissingTheta(missing.clone()));
    }
    if let Some(extra) = thetas.keys().find(|g| !groups.contains(g)) {
        return Err(Error::UnknownGroup(extra.clone()));
    }

    let mut balance = BTreeMap::new();
    for class in [ScoreClass::Negative, ScoreClass::Positive] {
        let required: BTreeSet<String> =
            thetas.iter().filter(|(_, t)| t.balance(class) > 0.0).map(|(g, _)| g.clone()).collect();
        if !required.is_empty() {
            balance.insert(class, balance_target_for(dataset, grid, class, &required)?);
        }
    }
    let target_for = |class: ScoreClass, group: &str| {
        balance.get(&class).and_then(|t| t.groups.get(group)).map(|(_, h)| h.clone())
    };

    let mut models = BTreeMap::new();
    for group in &groups {
        let theta = thetas[group];
        let Calibration { lambda_pos, mu_a } = fit_calibration(dataset, grid, group)?;
        let mu_b = target_for(ScoreClass::Negative, group);
        let mu_c = target_for(ScoreClass::Positive, group);

        let mut dists = Vec::with_capacity(3);
        let mut weights = Vec::with_capacity(3);
        for (dist, w) in [(Some(&mu_a), theta.a()), (mu_b.as_ref(), theta.b()), (mu_c.as_ref(), theta.c())] {
            if w > 0.0 {
                // required targets exist, checked above
                dists.push(dist.expect("target with positive weight").clone());
                weights.push(w);
            }
        }
        let mu_bar = barycenter(&dists, &renormalized(weights))?;

        let nu = conditional_nu(dataset, grid, group)?;
        let final_map = optimal_transport_map(&nu, &mu_bar)?;
        let (n_total, n_positive) = dataset.group_counts(group);
        models.insert(
            group.clone(),
            GroupModel { group: group.clone(), nu, lambda_pos, mu_a, mu_b, mu_c, mu_bar, final_map, n_total, n_positive },
        );
    }
    FaimModel::new(*grid, models, thetas.clone())
}

fn conditional_nu(dataset: &GroupedDataset, grid: &ScoreGrid, group: &str) -> Result<ScoreHistogram> {
    let mut counts = vec![0.0; grid.bins()];
    for (b, _) in member_bins(dataset, grid, group)? {
        counts[b] += 1.0;
    }
    counts_histogram(grid, counts)
}

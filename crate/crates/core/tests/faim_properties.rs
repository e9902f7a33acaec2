use std::collections::BTreeMap;

use faim_core::datasets::{generate_synthetic, SyntheticConfig};
use faim_core::faim::{conditional_distribution, fit, fit_balance_target, ScoreClass};
use faim_core::ot::{histogram_from_scores, push_forward, wasserstein2};
use faim_core::{FaimModel, GroupedDataset, Record, ScoreGrid, ThetaWeights};

const STEP: f64 = 0.01;

fn synthetic(n: usize, seed: u64) -> GroupedDataset {
    generate_synthetic(&SyntheticConfig { n, seed, ..Default::default() }).unwrap().dataset
}

fn grid() -> ScoreGrid {
    ScoreGrid::new(STEP).unwrap()
}

fn same(ds: &GroupedDataset, t: ThetaWeights) -> BTreeMap<String, ThetaWeights> {
    ds.groups().into_iter().map(|g| (g, t)).collect()
}

fn fitted(ds: &GroupedDataset, t: ThetaWeights) -> FaimModel {
    fit(ds, &grid(), &same(ds, t)).unwrap()
}

/// Mean absolute gap between positive fraction and bin center over fair
/// score bins with at least 50 members, plus the largest gap.
fn calibration_error(ds: &GroupedDataset, fair: &[f64]) -> (f64, f64) {
    let g = grid();
    let (mut total, mut count, mut worst) = (0.0, 0, 0.0f64);
    for group in ds.groups() {
        let mut members = vec![0usize; g.bins()];
        let mut positives = vec![0usize; g.bins()];
        for (r, f) in ds.records().iter().zip(fair).filter(|(r, _)| r.group == group) {
            let b = g.bin_of(*f);
            members[b] += 1;
            positives[b] += r.positive as usize;
        }
        for b in (0..g.bins()).filter(|&b| members[b] >= 50) {
            let gap = (positives[b] as f64 / members[b] as f64 - g.center(b)).abs();
            total += gap;
            count += 1;
            worst = worst.max(gap);
        }
    }
    (total / count as f64, worst)
}

#[test]
fn calibration_weight_calibrates_synthetic_scores_on_average() {
    for seed in 1..=3 {
        let ds = synthetic(40_000, seed);
        let fair = fitted(&ds, ThetaWeights::CALIBRATION).apply_dataset(&ds).unwrap();
        let (mae, _) = calibration_error(&ds, &fair);
        assert!(mae <= 2.0 * STEP, "seed {seed}: mean calibration error {mae}");
    }
}

#[test]
fn calibration_weight_calibrates_every_bin_when_positive_rate_is_monotone() {
    // 100 members per raw bin with a positive count rising in the score, so
    // the per-bin positive rate is non-decreasing in the raw score
    let mut records = Vec::new();
    for (group, curve) in [("low", 1.6), ("high", 0.6)] {
        for b in 10..90 {
            let s = (b as f64 + 0.5) / 100.0;
            let positives = (100.0 * s.powf(curve)).round() as usize;
            for k in 0..100 {
                records.push(Record {
                    id: format!("{group}-{b}-{k}"),
                    group: group.into(),
                    raw_score: s,
                    positive: k < positives,
                });
            }
        }
    }
    let ds = GroupedDataset::new(records).unwrap();
    let fair = fitted(&ds, ThetaWeights::CALIBRATION).apply_dataset(&ds).unwrap();
    let (_, worst) = calibration_error(&ds, &fair);
    assert!(worst <= 2.0 * STEP, "largest per-bin calibration gap {worst}");
}

#[test]
fn balance_targets_coincide_across_groups() {
    let ds = synthetic(40_000, 4);
    let g = grid();
    for class in [ScoreClass::Negative, ScoreClass::Positive] {
        let target = fit_balance_target(&ds, &g, class).unwrap();
        for group in ds.groups() {
            let sigma = conditional_distribution(&ds, &g, &group, class).unwrap();
            let (map, _) = &target.groups[&group];
            let pushed = push_forward(&sigma, map).unwrap();
            let d = wasserstein2(&pushed, &target.barycenter).unwrap();
            assert!(d <= 2.0 * STEP, "{class} {group}: W2 {d}");
        }
    }
}

#[test]
fn balance_weight_leaves_other_class_untouched_in_target() {
    let ds = synthetic(20_000, 5);
    let g = grid();
    let target = fit_balance_target(&ds, &g, ScoreClass::Negative).unwrap();
    for group in ds.groups() {
        let (_, mixture) = &target.groups[&group];
        let positives = conditional_distribution(&ds, &g, &group, ScoreClass::Positive).unwrap();
        let (n, p) = ds.group_counts(&group);
        let share = p as f64 / n as f64;
        // the mixture never holds less positive-class mass in a bin than the
        // untouched positives put there
        for (m, q) in mixture.mass().iter().zip(positives.mass()) {
            assert!(*m + 1e-12 >= share * q);
        }
    }
}

#[test]
fn fair_distribution_lies_inside_the_target_triangle() {
    let ds = synthetic(20_000, 6);
    let settings = [
        ThetaWeights::equal(),
        ThetaWeights::new(0.5, 0.5, 0.0).unwrap(),
        ThetaWeights::new(0.2, 0.3, 0.5).unwrap(),
        ThetaWeights::new(0.0, 0.7, 0.3).unwrap(),
    ];
    for t in settings {
        let model = fitted(&ds, t);
        for m in model.groups() {
            let targets = [&m.mu_a, m.mu_b.as_ref().unwrap_or(&m.mu_a), m.mu_c.as_ref().unwrap_or(&m.mu_a)];
            let w = t.as_array();
            for x in targets {
                let lhs = wasserstein2(&m.mu_bar, x).unwrap();
                let rhs: f64 = (0..3).map(|y| w[y] * wasserstein2(targets[y], x).unwrap()).sum();
                assert!(lhs <= rhs + 4.0 * STEP, "{} {t:?}: {lhs} > {rhs} + 4 step", m.group);
            }
        }
    }
}

#[test]
fn fitting_is_deterministic() {
    let ds = synthetic(10_000, 7);
    let t = ThetaWeights::new(0.2, 0.3, 0.5).unwrap();
    let a = fitted(&ds, t);
    let b = fitted(&ds, t);
    assert_eq!(a, b);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_to(&mut x).unwrap();
    b.write_to(&mut y).unwrap();
    assert_eq!(x, y);
}

fn three_groups() -> GroupedDataset {
    let base = synthetic(15_000, 8);
    let records = base
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let group = if i % 5 == 0 { "green".to_string() } else { r.group.clone() };
            Record { group, ..r.clone() }
        })
        .collect();
    GroupedDataset::new(records).unwrap()
}

#[test]
fn calibration_target_is_group_local() {
    let all = three_groups();
    let fewer = all.subset(&["blue", "orange"]).unwrap();
    let t = ThetaWeights::equal();
    let with = fitted(&all, t);
    let without = fitted(&fewer, t);
    for g in ["blue", "orange"] {
        assert_eq!(with.group(g).unwrap().mu_a, without.group(g).unwrap().mu_a);
        assert_eq!(with.group(g).unwrap().lambda_pos, without.group(g).unwrap().lambda_pos);
        assert_ne!(with.group(g).unwrap().mu_b, without.group(g).unwrap().mu_b);
        assert_ne!(with.group(g).unwrap().mu_c, without.group(g).unwrap().mu_c);
    }
}

#[test]
fn batch_apply_matches_push_forward() {
    let ds = synthetic(20_000, 9);
    let model = fitted(&ds, ThetaWeights::equal());
    let fair = model.apply_dataset(&ds).unwrap();
    for m in model.groups() {
        let scores: Vec<f64> =
            ds.records().iter().zip(&fair).filter(|(r, _)| r.group == m.group).map(|(_, f)| *f).collect();
        let applied = histogram_from_scores(&scores, &grid()).unwrap();
        let expected = push_forward(&m.nu, &m.final_map).unwrap();
        assert!(wasserstein2(&applied, &expected).unwrap() <= STEP);
    }
}

#[test]
fn final_maps_are_monotone() {
    let ds = synthetic(10_000, 10);
    for t in [ThetaWeights::CALIBRATION, ThetaWeights::NEGATIVE_BALANCE, ThetaWeights::POSITIVE_BALANCE] {
        for m in fitted(&ds, t).groups() {
            assert!(m.final_map.is_monotone());
        }
    }
}

#[test]
fn three_groups_fit_and_round_trip() {
    let ds = three_groups();
    let model = fitted(&ds, ThetaWeights::new(0.1, 0.6, 0.3).unwrap());
    assert_eq!(model.groups().count(), 3);
    let mut buf = Vec::new();
    model.write_to(&mut buf).unwrap();
    assert_eq!(FaimModel::read_from(buf.as_slice()).unwrap(), model);
}

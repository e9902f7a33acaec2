use faim_core::ot::{
    barycenter, barycenter_quantiles, displacement_interpolate, histogram_from_scores, monotone_coupling,
    optimal_transport_map,
    push_forward, quantile_levels, wasserstein2,
};
use faim_core::{ScoreGrid, ScoreHistogram};
use proptest::prelude::*;

fn histogram(bins: usize) -> impl Strategy<Value = ScoreHistogram> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.0f64..1.0], bins)
        .prop_filter("needs some mass", |v| v.iter().sum::<f64>() > 1e-6)
        .prop_map(move |v| {
            let grid = ScoreGrid::with_bins(bins).unwrap();
            ScoreHistogram::from_counts(grid, v).unwrap().normalized().unwrap()
        })
}

fn pair() -> impl Strategy<Value = (ScoreHistogram, ScoreHistogram)> {
    (1usize..=20).prop_flat_map(|b| (histogram(b), histogram(b)))
}

fn triple() -> impl Strategy<Value = (ScoreHistogram, ScoreHistogram, ScoreHistogram)> {
    (1usize..=20).prop_flat_map(|b| (histogram(b), histogram(b), histogram(b)))
}

fn total(h: &ScoreHistogram) -> f64 {
    h.mass().iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn w2_is_a_metric((a, b, c) in triple()) {
        let ab = wasserstein2(&a, &b).unwrap();
        prop_assert!(wasserstein2(&a, &a).unwrap() <= 1e-12);
        prop_assert!((ab - wasserstein2(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!(ab <= wasserstein2(&a, &c).unwrap() + wasserstein2(&c, &b).unwrap() + 1e-9);
        if a.mass().iter().zip(b.mass()).any(|(x, y)| (x - y).abs() > 1e-9) {
            prop_assert!(ab > 0.0);
        }
    }

    #[test]
    fn maps_are_monotone_and_in_range((a, b) in pair()) {
        let map = optimal_transport_map(&a, &b).unwrap();
        prop_assert!(map.is_monotone());
        let grid = a.grid();
        for (i, &t) in map.target().iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&t));
            prop_assert_eq!(map.is_defined(i), a.mass()[i] > 0.0);
            if !map.is_defined(i) {
                prop_assert_eq!(t, grid.center(i));
            }
        }
    }

    #[test]
    fn operations_preserve_normalization((a, b) in pair(), theta in 0.0f64..=1.0) {
        let map = optimal_transport_map(&a, &b).unwrap();
        prop_assert!((total(&push_forward(&a, &map).unwrap()) - 1.0).abs() <= 1e-9);
        prop_assert!((total(&displacement_interpolate(&a, &b, theta).unwrap()) - 1.0).abs() <= 1e-9);
        prop_assert!((total(&barycenter(&[a, b], &[1.0 - theta, theta]).unwrap()) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn push_forward_reconstruction_error_is_bounded((a, b) in pair()) {
        // Each source bin collapses onto its barycentric target, so the error is
        // the within-bin spread of the coupling plus half a step of re-binning.
        let grid = *a.grid();
        let map = optimal_transport_map(&a, &b).unwrap();
        let coupling = monotone_coupling(&a, &b).unwrap();
        let spread: f64 = coupling
            .entries()
            .iter()
            .map(|&(i, j, m)| m * (grid.center(j) - map.target()[i]).powi(2))
            .sum();
        let pushed = push_forward(&a, &map).unwrap();
        prop_assert!(wasserstein2(&pushed, &b).unwrap() <= spread.sqrt() + grid.stepsize() / 2.0 + 1e-12);
    }

    #[test]
    fn displacement_endpoints((a, b) in pair()) {
        let start = displacement_interpolate(&a, &b, 0.0).unwrap();
        for (x, y) in start.mass().iter().zip(a.mass()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        let end = displacement_interpolate(&a, &b, 1.0).unwrap();
        let pushed = push_forward(&a, &optimal_transport_map(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(end.mass(), pushed.mass());
        let step = a.grid().stepsize();
        let rebinned = displacement_interpolate(&a, &a, 1.0).unwrap();
        prop_assert!(wasserstein2(&rebinned, &a).unwrap() <= step + 1e-12);
    }

    #[test]
    fn two_input_barycenter_is_displacement((a, b) in pair(), w in 0.0f64..=1.0) {
        let step = a.grid().stepsize();
        let bary = barycenter(&[a.clone(), b.clone()], &[1.0 - w, w]).unwrap();
        let geo = displacement_interpolate(&a, &b, w).unwrap();
        prop_assert!(wasserstein2(&bary, &geo).unwrap() <= 2.0 * step + 1e-12);
    }

    #[test]
    fn barycenter_quantile_property((a, b, c) in triple(), w1 in 0.0f64..1.0, w2 in 0.0f64..1.0) {
        let weights = {
            let (x, y) = (w1.min(w2), w1.max(w2));
            [x, y - x, 1.0 - y]
        };
        let dists = [a, b, c];
        let step = dists[0].grid().stepsize();
        let bary = barycenter(&dists, &weights).unwrap();
        let averaged = barycenter_quantiles(&dists, &weights).unwrap();
        for (level, expected) in quantile_levels(step.recip().round() as usize).iter().zip(&averaged) {
            let direct: f64 = dists.iter().zip(&weights).map(|(d, w)| w * d.quantile(*level)).sum();
            prop_assert!((direct - expected).abs() <= 1e-12);
            prop_assert!((bary.quantile(*level) - expected).abs() <= step + 1e-12);
        }
    }
}

#[test]
fn collapsing_a_point_mass_exceeds_one_step() {
    let grid = ScoreGrid::new(0.25).unwrap();
    let point = ScoreHistogram::point_mass(grid, 0);
    let uniform = ScoreHistogram::from_mass(grid, vec![0.25; 4]).unwrap();
    let pushed = push_forward(&point, &optimal_transport_map(&point, &uniform).unwrap()).unwrap();
    assert_eq!(pushed.mass(), &[0.0, 0.0, 1.0, 0.0]);
    assert!(wasserstein2(&pushed, &uniform).unwrap() > grid.stepsize());
}

#[test]
fn histogram_of_many_scores_is_normalized() {
    let grid = ScoreGrid::new(0.01).unwrap();
    let scores: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.618_033_988_75) % 1.0).collect();
    let h = histogram_from_scores(&scores, &grid).unwrap();
    assert!((total(&h) - 1.0).abs() <= 1e-9);
}

/// Sum of weighted squared L2 distances between quantile functions sampled on
/// the midpoint levels.
fn functional(candidate: &[f64], inputs: &[Vec<f64>], weights: &[f64]) -> f64 {
    let q = candidate.len() as f64;
    inputs
        .iter()
        .zip(weights)
        .map(|(qs, w)| w * candidate.iter().zip(qs).map(|(c, x)| (c - x) * (c - x)).sum::<f64>() / q)
        .sum()
}

#[test]
fn barycenter_minimizes_functional_among_quantile_mixtures() {
    let grid = ScoreGrid::with_bins(8).unwrap();
    let raw = [
        [3.0, 1.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, 4.0, 1.0, 0.0, 0.0, 2.0],
        [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 3.0, 5.0],
    ];
    let dists: Vec<ScoreHistogram> =
        raw.iter().map(|r| ScoreHistogram::from_counts(grid, r.to_vec()).unwrap().normalized().unwrap()).collect();
    let weights = [1.0 / 3.0; 3];
    let levels = quantile_levels(grid.bins());
    let inputs: Vec<Vec<f64>> = dists.iter().map(|d| levels.iter().map(|&l| d.quantile(l)).collect()).collect();
    let best = functional(&barycenter_quantiles(&dists, &weights).unwrap(), &inputs, &weights);

    let steps = 40;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let lam = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
            let candidate: Vec<f64> =
                (0..levels.len()).map(|k| (0..3).map(|d| lam[d] * inputs[d][k]).sum()).collect();
            let value = functional(&candidate, &inputs, &weights);
            assert!(best <= value * (1.0 + 1e-6) + 1e-15, "mixture {lam:?}: {value} < {best}");
        }
    }
}

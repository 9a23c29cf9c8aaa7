use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tripartite_core::embedding::EmbeddedCloud;
use tripartite_core::recurrence::*;
use tripartite_core::spatial::distance;
use tripartite_core::{Error, ScalarTimeSeries};

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> EmbeddedCloud {
    EmbeddedCloud::from_points((0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect(), dim).unwrap()
}

fn dense(cloud: &EmbeddedCloud, eps: f64) -> Vec<Vec<bool>> {
    let n = cloud.len();
    (0..n)
        .map(|i| (0..n).map(|j| distance(cloud.point(i), cloud.point(j)) <= eps).collect())
        .collect()
}

fn series(values: Vec<f64>) -> ScalarTimeSeries {
    ScalarTimeSeries::from_values(values).unwrap()
}

#[test]
fn coincident_points_recur_everywhere() {
    let cloud = EmbeddedCloud::from_points(vec![0.3; 3 * 25], 3).unwrap();
    let g = recurrence_matrix(&cloud, 1e-9);
    assert_eq!(g.nnz(), 25 * 25);
    assert_eq!(recurrence_plot_data(&g, 1).len(), 625);
}

#[test]
fn distant_pair_is_identity() {
    let cloud = EmbeddedCloud::from_points(vec![0.0, 0.0, 3.0, 4.0], 2).unwrap();
    let g = recurrence_matrix(&cloud, 4.99);
    assert_eq!(recurrence_plot_data(&g, 1), vec![(0, 0), (1, 1)]);
    assert_eq!(g.off_diagonal_density(), 0.0);
    assert!(recurrence_matrix(&cloud, 5.0).contains(0, 1));
}

#[test]
fn median_threshold_matches_dense_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cloud = random_cloud(&mut rng, 100, 3);
    let mut d: Vec<f64> = Vec::new();
    for i in 0..100 {
        for j in i + 1..100 {
            d.push(distance(cloud.point(i), cloud.point(j)));
        }
    }
    d.sort_by(f64::total_cmp);
    let eps = d[d.len() / 2];
    let g = recurrence_matrix(&cloud, eps);
    let want = dense(&cloud, eps);
    for i in 0..100 {
        for j in 0..100 {
            assert_eq!(g.contains(i, j), want[i][j]);
        }
    }
}

#[test]
fn tree_search_matches_dense_scan_on_larger_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (n, dim) in [(2000, 2), (1500, 4)] {
        let cloud = random_cloud(&mut rng, n, dim);
        let eps = 0.2;
        let g = recurrence_matrix(&cloud, eps);
        let want = dense(&cloud, eps);
        for i in 0..n {
            let row: Vec<u32> = (0..n).filter(|&j| want[i][j]).map(|j| j as u32).collect();
            assert_eq!(g.row(i), row.as_slice());
        }
        let density = recurrence_density(&cloud, eps);
        assert!((density - g.off_diagonal_density()).abs() < 1e-15);
    }
}

#[test]
fn strided_pairs_agree_with_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cloud = random_cloud(&mut rng, 400, 2);
    let g = recurrence_matrix(&cloud, 0.3);
    for stride in [1, 3, 10] {
        let mut a = recurrence_plot_data(&g, stride);
        let mut b = recurrence_plot_pairs(&cloud, 0.3, stride);
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        assert!(a.iter().all(|&(i, j)| i % stride == 0 && j % stride == 0));
        assert!((0..400).step_by(stride).all(|i| a.binary_search(&(i, i)).is_ok()));
    }
}

#[test]
fn critical_threshold_of_two_clusters_is_the_gap() {
    let mut pts = vec![0.0; 2 * 10];
    pts.extend(std::iter::repeat_n([2.5, 0.0], 10).flatten());
    let cloud = EmbeddedCloud::from_points(pts, 2).unwrap();
    let c = epsilon_critical_with(&cloud, BISECTION_STEPS).unwrap();
    assert!((c.epsilon - 2.5).abs() <= 1e-4 * c.diameter);
    assert!(c.lower < 2.5 && c.epsilon >= 2.5);
}

#[test]
fn critical_threshold_of_unit_chain_is_one() {
    let cloud = EmbeddedCloud::from_points((0..=10).map(f64::from).collect(), 1).unwrap();
    let eps = epsilon_critical(&cloud).unwrap();
    assert!((eps - 1.0).abs() <= 1e-4 * 10.0, "{eps}");
}

#[test]
fn critical_threshold_rejects_coincident_cloud() {
    let cloud = EmbeddedCloud::from_points(vec![1.0; 30], 3).unwrap();
    assert!(matches!(epsilon_critical(&cloud), Err(Error::Degenerate(_))));
}

#[test]
fn union_find_agrees_with_laplacian_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [40, 120, 300] {
        let cloud = random_cloud(&mut rng, n, 3);
        let a = epsilon_critical_with(&cloud, 20).unwrap();
        let b = epsilon_critical_spectral(&cloud, 20).unwrap();
        assert!((a.epsilon - b.epsilon).abs() <= 1e-4 * a.diameter, "{a:?} {b:?}");
    }
}

#[test]
fn laplacian_facts_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..12 {
        let n = rng.random_range(5..=300);
        let cloud = random_cloud(&mut rng, n, 2);
        let eps = rng.random_range(0.02..0.4);
        let g = recurrence_matrix(&cloud, eps);
        let l = laplacian(&g);
        assert_eq!(l, l.transpose());
        for i in 0..n {
            assert!(l.row(i).sum().abs() < 1e-12);
        }
        let ev = laplacian_eigenvalues(&g);
        assert!(ev.iter().all(|&v| v >= -1e-10));
        let tree = cloud.tree();
        assert_eq!(zero_eigenvalue_count(&g), component_count(&tree, eps), "trial {trial}");
    }
}

#[test]
fn threshold_upper_bound_is_consecutive_step() {
    let cloud = EmbeddedCloud::from_points(vec![0.0, 1.0, 3.0, 3.5], 1).unwrap();
    assert_eq!(max_consecutive_step(&cloud), 2.0);
}

#[test]
fn return_map_examples() {
    let flat = return_map(&series(vec![4.0; 10]), 1);
    assert_eq!(flat.len(), 9);
    assert!(flat.iter().all(|&p| p == (4.0, 4.0)));
    let alt = return_map(&series(vec![1.0, 2.0, 1.0, 2.0, 1.0]), 1);
    let mut distinct = alt.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    assert_eq!(distinct, vec![(1.0, 2.0), (2.0, 1.0)]);
    assert_eq!(return_map(&series(vec![1.0, 2.0, 3.0]), 2), vec![(1.0, 3.0)]);
}

#[test]
fn dip_matches_reference_values() {
    let phi = 0.6180339887498949f64;
    let frac = |x: f64| x - x.floor();
    let cases: Vec<(Vec<f64>, f64)> = vec![
        ((1..=200).map(|i| frac(i as f64 * phi)).collect(), 0.004882139081525398),
        (
            (1..=150)
                .map(|i| if i % 2 == 1 { frac(i as f64 * phi) } else { 3.0 + frac(i as f64 * phi * 1.3) })
                .collect(),
            0.16817660222858233,
        ),
        (
            (1..=97).map(|i| (std::f64::consts::PI * (frac(i as f64 * phi) - 0.5)).tan()).collect(),
            0.009108671153867409,
        ),
        ((1..=300).map(|i| (i as f64).sin().powi(3)).collect(), 0.027474209331794567),
        (
            (1..=120)
                .map(|i| if i <= 90 { 2.0 * frac(i as f64 * phi) } else { 5.0 + frac(i as f64 * 2f64.sqrt()) })
                .collect(),
            0.09462409707958343,
        ),
    ];
    for (k, (sample, want)) in cases.iter().enumerate() {
        let got = dip_statistic(sample);
        assert!((got - want).abs() < 1e-12, "case {k}: {got} vs {want}");
    }
}

#[test]
fn ring_statistic_separates_rings_from_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let ring: Vec<(f64, f64)> = (0..4000)
        .map(|_| {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let r = 1.0 + 0.05 * normal.sample(&mut rng);
            (3.0 + r * a.cos(), -1.0 + r * a.sin())
        })
        .collect();
    let blob: Vec<(f64, f64)> = (0..4000).map(|_| (normal.sample(&mut rng), normal.sample(&mut rng))).collect();
    let disc: Vec<(f64, f64)> = (0..4000)
        .map(|_| {
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            let r = rng.random::<f64>().sqrt();
            (r * a.cos(), r * a.sin())
        })
        .collect();
    let r = ring_statistic(&ring).unwrap();
    assert!(r.is_annular(), "{r:?}");
    assert!((r.centroid.0 - 3.0).abs() < 0.05 && (r.centroid.1 + 1.0).abs() < 0.05);
    assert!(!ring_statistic(&blob).unwrap().is_annular());
    assert!(!ring_statistic(&disc).unwrap().is_annular());
}

#[test]
fn periodic_orbit_returns_at_its_period() {
    let pattern = [0.05, 0.45, 0.95, 0.25, 0.75];
    let values: Vec<f64> = (0..500).map(|i| pattern[i % 5]).collect();
    let h = first_return_distribution(&series(values), 10).unwrap();
    assert_eq!(h.pooled, BTreeMap::from([(5, 495)]));
    assert_eq!(h.edges.len(), 11);
    assert!(h.edges.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn lingering_visits_are_not_counted() {
    // Cells: 0 0 1 0 1 1 0
    let values = vec![0.0, 0.1, 0.9, 0.2, 1.0, 0.8, 0.3];
    let h = first_return_distribution(&series(values), 2).unwrap();
    // Cell 0 exits at t = 1 and t = 3, returning after 2 and 3 steps.
    assert_eq!(h.per_cell[0], BTreeMap::from([(2, 1), (3, 1)]));
    // Cell 1 exits at t = 2 (back at t = 4) and at t = 5 (never back).
    assert_eq!(h.per_cell[1], BTreeMap::from([(2, 1)]));
    assert_eq!(h.visits, vec![4, 3]);
    assert_eq!(h.generic_cell(), 0);
}

#[test]
fn return_times_are_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 10.0).collect();
    let a = first_return_distribution(&series(x), 50).unwrap();
    let b = first_return_distribution(&series(y), 50).unwrap();
    assert_eq!(a.per_cell, b.per_cell);
    assert_eq!(a.visits, b.visits);
}

#[test]
fn constant_series_has_no_return_histogram() {
    assert!(matches!(first_return_distribution(&series(vec![2.0; 100]), 50), Err(Error::Degenerate(_))));
}

#[test]
fn spike_ordering() {
    let left = BTreeMap::from([(3, 20), (4, 5), (8, 100), (9, 40), (10, 2), (12, 5)]);
    let s = spikes(&left, SPIKE_FRACTION).unwrap();
    assert_eq!(s.dominant, 8);
    assert_eq!(s.secondary, vec![(3, 20)]);
    assert!(s.all_secondary_left() && !s.all_secondary_right());
    let right = BTreeMap::from([(5, 50), (6, 9), (11, 30)]);
    let s = spikes(&right, SPIKE_FRACTION).unwrap();
    assert_eq!(s.secondary, vec![(11, 30)]);
    assert!(s.all_secondary_right());
    assert!(spikes(&BTreeMap::new(), 0.1).is_none());
}

#[test]
fn spectrum_of_pure_tone() {
    let s = series((0..1000).map(|i| (2.0 * std::f64::consts::PI * 0.01 * i as f64).sin()).collect());
    let sp = power_spectrum(&s).unwrap();
    let peak = sp.peak();
    assert!((sp.frequency[peak] - 0.01).abs() < 1e-12);
    assert!(sp.power[peak] > 0.99 * sp.total_power());
}

#[test]
fn spectrum_of_constant_is_zero() {
    let sp = power_spectrum(&series(vec![3.0; 512])).unwrap();
    assert!(sp.power.iter().all(|&p| p == 0.0));
    assert!(matches!(power_spectrum(&series(vec![1.0; 100])), Err(Error::InsufficientLength { .. })));
}

#[test]
fn white_noise_spectrum_is_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let normal = Normal::new(0.0, 1.5).unwrap();
    let s = series((0..8192).map(|_| normal.sample(&mut rng)).collect());
    let sp = power_spectrum(&s).unwrap();
    assert!((sp.total_power() - 2.25).abs() < 0.05 * 2.25);
    let n = sp.power.len();
    let first: f64 = sp.power[1..n / 2].iter().sum();
    let second: f64 = sp.power[n / 2..].iter().sum();
    assert!((first / second - 1.0).abs() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thresholding_is_monotone(seed in 0u64..1000, e1 in 0.01f64..0.5, de in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cloud = random_cloud(&mut rng, 150, 2);
        let a = recurrence_matrix(&cloud, e1);
        let b = recurrence_matrix(&cloud, e1 + de);
        for i in 0..150 {
            for &j in a.row(i) {
                prop_assert!(b.contains(i, j as usize));
            }
            prop_assert!(a.contains(i, i));
            for &j in a.row(i) {
                prop_assert!(a.contains(j as usize, i));
            }
        }
    }

    #[test]
    fn parseval_holds(values in prop::collection::vec(-50.0f64..50.0, 256..1200)) {
        let s = series(values);
        let sp = power_spectrum(&s).unwrap();
        let var = s.variance();
        prop_assert!((sp.total_power() - var).abs() <= 1e-6 * var.max(1e-300));
        prop_assert!(sp.power.iter().all(|&p| p >= 0.0));
    }
}

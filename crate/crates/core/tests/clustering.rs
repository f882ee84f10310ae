use itertools::Itertools;
use lrssc::datagen::{generate_synthetic, generate_synthetic_with_bases, LabeledDataset, SyntheticSpec};
use lrssc::eval::{clustering_error, grid_search, GridSpec, SearchStrategy};
use lrssc::linalg::numerical_rank;
use lrssc::pipeline::{Algorithm, RunSettings};
use lrssc::spectral::{build_affinity, spectral_cluster, AffinityMatrix, ClusterLabels};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn brute_force_ce(pred: &[usize], truth: &[usize], k: usize) -> f64 {
    let best = (0..k)
        .permutations(k)
        .map(|perm| pred.iter().zip(truth).filter(|(p, t)| perm[**p] == **t).count())
        .max()
        .unwrap();
    1.0 - best as f64 / pred.len() as f64
}

fn labels_strategy() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>)> {
    (2usize..=6, 1usize..40).prop_flat_map(|(k, n)| {
        (
            Just(k),
            prop::collection::vec(0..k, n),
            prop::collection::vec(0..k, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hungarian_equals_brute_force((k, p, t) in labels_strategy()) {
        let pred = ClusterLabels::new(p.clone(), k).unwrap();
        let truth = ClusterLabels::new(t.clone(), k).unwrap();
        let report = clustering_error(&pred, &truth).unwrap();
        prop_assert_eq!(report.ce, brute_force_ce(&p, &t, k));
        prop_assert!((0.0..=1.0).contains(&report.ce));
        prop_assert_eq!(clustering_error(&truth, &pred).unwrap().ce, report.ce);
        let mut seen = report.matching.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..k).collect::<Vec<_>>());
    }

    #[test]
    fn ce_invariant_under_relabeling((k, p, t) in labels_strategy(), shift in 1usize..6) {
        let relabeled: Vec<usize> = p.iter().map(|&l| (l + shift) % k).collect();
        let truth = ClusterLabels::new(t, k).unwrap();
        let a = clustering_error(&ClusterLabels::new(p, k).unwrap(), &truth).unwrap().ce;
        let b = clustering_error(&ClusterLabels::new(relabeled, k).unwrap(), &truth).unwrap().ce;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spectral_recovers_shuffled_blocks(sizes in prop::collection::vec(2usize..8, 2..6), seed in any::<u64>()) {
        let owner: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect();
        let n = owner.len();
        // scatter block membership across indices
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        let mut pos = vec![0; n];
        if perm.iter().collect::<std::collections::HashSet<_>>().len() == n {
            for (i, &p) in perm.iter().enumerate() { pos[p] = i; }
        } else {
            pos = (0..n).collect();
        }
        let truth: Vec<usize> = (0..n).map(|i| owner[pos[i]]).collect();
        let w = DMatrix::from_fn(n, n, |i, j| if i != j && truth[i] == truth[j] { 1.0 + ((i + j) % 3) as f64 } else { 0.0 });
        let w = AffinityMatrix::from_matrix(w).unwrap();
        let got = spectral_cluster(&w, sizes.len(), seed).unwrap();
        let ce = clustering_error(&got, &ClusterLabels::new(truth, sizes.len()).unwrap()).unwrap().ce;
        prop_assert_eq!(ce, 0.0);
    }

    #[test]
    fn affinity_is_symmetric_nonnegative(vals in prop::collection::vec(-5.0f64..5.0, 16)) {
        let c = DMatrix::from_vec(4, 4, vals);
        let w = build_affinity(&c).unwrap();
        prop_assert_eq!(w.matrix(), &w.matrix().transpose());
        prop_assert!(w.matrix().iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn synthetic_union_rank_is_exact(d in 1usize..5, l in 2usize..5, extra in 1usize..12, seed in any::<u64>()) {
        let rank = (d + extra).min(d * l);
        let spec = SyntheticSpec {
            ambient_dim: rank + 5,
            subspace_dim: d,
            num_subspaces: l,
            points_per_subspace: d + 3,
            noise_variance: 0.0,
            union_rank: rank,
            seed,
        };
        match generate_synthetic_with_bases(&spec) {
            Ok(sample) => {
                let cols: Vec<_> = sample.bases.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect();
                let stacked = DMatrix::from_columns(&cols);
                prop_assert_eq!(numerical_rank(&stacked, 1e-10).unwrap(), rank);
                prop_assert_eq!(numerical_rank(&sample.dataset.x, 1e-10).unwrap(), rank);
                for u in &sample.bases {
                    prop_assert!((u.transpose() * u - DMatrix::<f64>::identity(d, d)).amax() < 1e-12);
                }
            }
            // only window collisions are allowed to fail
            Err(e) => prop_assert!(matches!(e, lrssc::Error::InvalidParameter(_)), "{e}"),
        }
    }
}

fn easy_datasets() -> Vec<LabeledDataset> {
    (0..2)
        .map(|seed| {
            generate_synthetic(&SyntheticSpec {
                ambient_dim: 20,
                subspace_dim: 2,
                num_subspaces: 3,
                points_per_subspace: 10,
                noise_variance: 0.0,
                union_rank: 6,
                seed,
            })
            .unwrap()
        })
        .collect()
}

#[test]
fn single_point_grid_returns_that_point() {
    let data = easy_datasets();
    let grid = GridSpec {
        lambdas: vec![0.9],
        mu_inits: vec![5.0],
        gammas: vec![0.6],
        strategy: SearchStrategy::Cartesian,
    };
    let base = RunSettings::defaults_for(Algorithm::Gmc);
    let res = grid_search(&data, Algorithm::Gmc, &base, &grid, 0).unwrap();
    assert_eq!(res.table.len(), 1);
    assert_eq!(res.best.coord, (0, 0, 0));
    assert_eq!(res.best.trial_ce.len(), 2);
    assert_eq!(res.best.settings.solver.lambda, 0.9);
}

#[test]
fn grid_picks_the_perfect_config() {
    // independent subspaces: closed-form LRR is exact, and tiny weights zero everything out
    let data = easy_datasets();
    let grid = GridSpec {
        lambdas: vec![1e-6, 1e6],
        mu_inits: vec![],
        gammas: vec![],
        strategy: SearchStrategy::TwoPhase,
    };
    let base = RunSettings::defaults_for(Algorithm::Lrr);
    let res = grid_search(&data, Algorithm::Lrr, &base, &grid, 3).unwrap();
    assert_eq!(res.best.stats.mean, 0.0);
    assert_eq!(res.best.settings.lrr_lambda, Some(1e6));
    assert!(res.table[0].stats.mean > 0.0);
}

#[test]
fn grid_search_is_deterministic_and_tie_breaks_low() {
    let data = easy_datasets();
    let grid = GridSpec {
        lambdas: vec![0.9, 0.8],
        mu_inits: vec![5.0, 10.0],
        gammas: vec![0.6],
        strategy: SearchStrategy::Cartesian,
    };
    let base = RunSettings::defaults_for(Algorithm::Gmc);
    let a = grid_search(&data, Algorithm::Gmc, &base, &grid, 1).unwrap();
    let b = grid_search(&data, Algorithm::Gmc, &base, &grid, 1).unwrap();
    assert_eq!(a, b);
    let best_mean = a.table.iter().map(|p| p.stats.mean).fold(f64::INFINITY, f64::min);
    let first = a.table.iter().find(|p| p.stats.mean == best_mean).unwrap();
    assert_eq!(a.best.coord, first.coord);
}

#[test]
fn two_phase_tunes_lambda_then_mu() {
    let data = easy_datasets();
    let grid = GridSpec {
        lambdas: vec![0.9, 0.5, 0.1],
        mu_inits: vec![1.0, 3.0],
        gammas: vec![0.6],
        strategy: SearchStrategy::TwoPhase,
    };
    let res = grid_search(&data, Algorithm::Gmc, &RunSettings::defaults_for(Algorithm::Gmc), &grid, 0).unwrap();
    // three λ points at the base μ⁰, then two μ⁰ points at the chosen λ
    assert_eq!(res.table.len(), 5);
    let chosen = res.table[3].coord.0;
    assert_eq!(res.table[4].coord.0, chosen);
}

use lrssc::admm::steps::{
    dual_update, gmc_c1_update, gmc_c2_update, j_update, mu_update,
};
use lrssc::admm::{
    gmc_lrssc_solve, lagrangian_value, s0l0_lrssc_solve, Problem, SolverConfig, SolverState,
    Termination, ThreeBlockSolver, Variant,
};
use lrssc::baselines::convex_lrssc;
use lrssc::datagen::{generate_synthetic, SyntheticSpec};
use lrssc::linalg::ThinSvd;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn small_data(seed: u64, noise: f64) -> DMatrix<f64> {
    let spec = SyntheticSpec {
        ambient_dim: 30,
        subspace_dim: 3,
        num_subspaces: 3,
        points_per_subspace: 12,
        noise_variance: noise,
        union_rank: 6,
        seed,
    };
    generate_synthetic(&spec).unwrap().x
}

fn within(lower: f64, upper: f64) -> bool {
    lower <= upper + 1e-8 * upper.abs().max(lower.abs()).max(1.0)
}

/// Each block update must not raise the augmented Lagrangian.
fn check_block_descent(variant: Variant, cfg: &SolverConfig, x: DMatrix<f64>, iters: usize) {
    let problem = Problem::new(x).unwrap();
    let solver = ThreeBlockSolver::new(&problem, cfg, variant).unwrap();
    let model = *solver.model();
    let mut s = SolverState::zeros(problem.num_points(), cfg);
    for k in 0..iters {
        let l0 = lagrangian_value(&problem, &s, &model).unwrap();
        s.j = j_update(&problem, &s).unwrap();
        let l1 = lagrangian_value(&problem, &s, &model).unwrap();
        s.c1 = gmc_c1_update(&s, &model).unwrap();
        let l2 = lagrangian_value(&problem, &s, &model).unwrap();
        s.c2 = gmc_c2_update(&s, &model).unwrap();
        let l3 = lagrangian_value(&problem, &s, &model).unwrap();
        assert!(within(l1, l0), "iter {k}: J step {l0} -> {l1}");
        assert!(within(l2, l1), "iter {k}: C1 step {l1} -> {l2}");
        assert!(within(l3, l2), "iter {k}: C2 step {l2} -> {l3}");
        dual_update(&mut s);
        s.mu1 = mu_update(s.mu1, cfg);
        s.mu2 = mu_update(s.mu2, cfg);
    }
}

#[test]
fn block_descent_gmc_and_convex() {
    for gamma in [0.1, 0.6, 0.95] {
        let cfg = SolverConfig {
            gamma,
            normalize_j: false,
            ..SolverConfig::gmc_default()
        };
        check_block_descent(Variant::Gmc, &cfg, small_data(3, 0.0), 20);
        check_block_descent(Variant::Gmc, &cfg, small_data(4, 0.05), 20);
    }
    let cfg = SolverConfig {
        normalize_j: false,
        ..SolverConfig::gmc_default()
    };
    check_block_descent(Variant::Convex, &cfg, small_data(5, 0.0), 20);
}

#[test]
fn multipliers_stay_bounded_and_c2_diagonal_zero() {
    let cfg = SolverConfig::gmc_default();
    let problem = Problem::new(small_data(7, 0.01)).unwrap();
    let (w_rank, w_sparse) = cfg.effective_weights(Variant::Gmc);
    let mut solver = ThreeBlockSolver::new(&problem, &cfg, Variant::Gmc).unwrap();
    for _ in 0..40 {
        solver.step().unwrap();
        let s = solver.state();
        let spectral = ThinSvd::new(&s.lambda1).unwrap().singular_values[0];
        assert!(spectral <= w_rank * (1.0 + 1e-9), "‖Λ1‖₂ = {spectral}");
        for i in 0..s.c2.nrows() {
            assert_eq!(s.c2[(i, i)], 0.0);
            for j in 0..s.c2.ncols() {
                if i != j {
                    assert!(s.lambda2[(i, j)].abs() <= w_sparse * (1.0 + 1e-9));
                }
            }
        }
    }
}

#[test]
fn penalty_schedule_is_geometric_and_capped() {
    let cfg = SolverConfig {
        max_iters: 30,
        epsilon: 1e-300,
        ..SolverConfig::gmc_default()
    };
    let (_, trace) = gmc_lrssc_solve(&small_data(1, 0.0), &cfg).unwrap();
    assert_eq!(trace.termination, Termination::MaxIters);
    assert_eq!(trace.iterations(), 30);
    for (k, r) in trace.records.iter().enumerate() {
        let want1 = (cfg.mu1_init * cfg.rho.powi(k as i32)).min(cfg.mu_max);
        let want2 = (cfg.mu2_init * cfg.rho.powi(k as i32)).min(cfg.mu_max);
        assert!((r.mu1.unwrap() - want1).abs() <= 1e-9 * want1);
        assert!((r.mu2.unwrap() - want2).abs() <= 1e-9 * want2);
        assert_eq!(r.iter, k + 1);
    }
    assert_eq!(trace.records.last().unwrap().mu1, Some(cfg.mu_max));
}

#[test]
fn stopping_rule_matches_trace() {
    for (c, trace) in [
        gmc_lrssc_solve(&small_data(2, 0.0), &SolverConfig::gmc_default()).unwrap(),
        s0l0_lrssc_solve(&small_data(2, 0.0), &SolverConfig::s0l0_default()).unwrap(),
        convex_lrssc(&small_data(2, 0.0), &SolverConfig::gmc_default()).unwrap(),
    ] {
        assert!(trace.converged());
        assert!(c.iter().all(|v| v.is_finite()));
        let eps = 1e-4;
        let below = |r: &lrssc::admm::IterationRecord| {
            [r.r_jc1, r.r_jc2, r.r_jj].into_iter().flatten().all(|v| v <= eps)
        };
        let (last, earlier) = trace.records.split_last().unwrap();
        assert!(below(last));
        assert!(earlier.iter().all(|r| !below(r)));
        let kkt = trace.kkt.unwrap();
        assert!(kkt.max().is_finite());
    }
}

#[test]
fn runs_are_bit_identical() {
    let x = small_data(11, 0.02);
    let a = gmc_lrssc_solve(&x, &SolverConfig::gmc_default()).unwrap();
    let b = gmc_lrssc_solve(&x, &SolverConfig::gmc_default()).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    let a = s0l0_lrssc_solve(&x, &SolverConfig::s0l0_default()).unwrap();
    let b = s0l0_lrssc_solve(&x, &SolverConfig::s0l0_default()).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}

#[test]
fn tiny_gamma_approaches_convex() {
    let x = small_data(6, 0.0);
    let cfg = SolverConfig {
        gamma: 1e-6,
        ..SolverConfig::gmc_default()
    };
    let (gmc, _) = gmc_lrssc_solve(&x, &cfg).unwrap();
    let (convex, _) = convex_lrssc(&x, &cfg).unwrap();
    let rel = (&gmc - &convex).norm() / convex.norm();
    assert!(rel <= 1e-4, "{rel:e}");
}

#[test]
fn unit_gamma_flags_knee_adjustment() {
    let cfg = SolverConfig {
        gamma: 1.0,
        ..SolverConfig::gmc_default()
    };
    let (_, trace) = gmc_lrssc_solve(&small_data(8, 0.0), &cfg).unwrap();
    assert!(trace.knee_adjusted);
    let (_, trace) = gmc_lrssc_solve(&small_data(8, 0.0), &SolverConfig::gmc_default()).unwrap();
    assert!(!trace.knee_adjusted);
}

#[test]
fn bad_configs_fail_before_iterating() {
    let x = small_data(9, 0.0);
    let bad = [
        SolverConfig { rho: 1.0, ..SolverConfig::gmc_default() },
        SolverConfig { gamma: 0.0, ..SolverConfig::gmc_default() },
        SolverConfig { max_iters: 0, ..SolverConfig::gmc_default() },
        SolverConfig { mu_max: 1.0, ..SolverConfig::gmc_default() },
    ];
    for cfg in bad {
        let err = gmc_lrssc_solve(&x, &cfg).unwrap_err();
        assert!(matches!(err.error, lrssc::Error::InvalidParameter(_)));
        assert_eq!(err.partial.iterations(), 0);
    }
    let unbalanced = SolverConfig { tau: 0.7, ..SolverConfig::s0l0_default() };
    assert!(s0l0_lrssc_solve(&x, &unbalanced).is_err());
    assert!(gmc_lrssc_solve(&DMatrix::from_element(3, 1, 1.0), &SolverConfig::gmc_default()).is_err());
}

#[test]
fn s0l0_with_single_penalty() {
    // τ = 0 leaves only the rank term
    let x = small_data(10, 0.0);
    let cfg = SolverConfig::s0l0_default().with_lambda(1.0);
    let (c, trace) = s0l0_lrssc_solve(&x, &cfg).unwrap();
    assert!(trace.iterations() >= 1);
    assert!(c.iter().all(|v| v.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn penalty_update_never_exceeds_cap(mu in 1e-3f64..1e7, rho in 1.01f64..10.0) {
        let cfg = SolverConfig { rho, mu_max: 1e6, ..SolverConfig::gmc_default() };
        let next = mu_update(mu, &cfg);
        prop_assert!(next <= cfg.mu_max.max(mu));
        prop_assert!(next >= mu.min(cfg.mu_max));
    }

    #[test]
    fn solver_output_is_finite(seed in 0u64..1000, noise in 0.0f64..0.3, gamma in 0.05f64..1.0) {
        let cfg = SolverConfig { gamma, max_iters: 25, ..SolverConfig::gmc_default() };
        let (c, trace) = gmc_lrssc_solve(&small_data(seed, noise), &cfg).unwrap();
        prop_assert!(c.iter().all(|v| v.is_finite()));
        prop_assert!(trace.iterations() <= 25);
        prop_assert!(trace.records.iter().all(|r| r.lagrangian.unwrap().is_finite()));
    }
}

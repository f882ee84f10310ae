use lrssc::baselines::{lrr_noiseless, lrr_noisy};
use lrssc::linalg::SortedEigen;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

/// `(U, σ, V)` via faer; nalgebra's SVD is unreliable on rank-deficient input.
fn svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let d = f.thin_svd().unwrap();
    let back = |x: faer::MatRef<'_, f64>| DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]);
    let s = d.S().column_vector().iter().copied().collect();
    (back(d.U()), s, back(d.V()))
}

fn nuclear(m: &DMatrix<f64>) -> f64 {
    svd(m).1.iter().sum()
}

fn objective(x: &DMatrix<f64>, c: &DMatrix<f64>, lambda: f64) -> f64 {
    0.5 * lambda * (x - x * c).norm_squared() + nuclear(c)
}

fn svt(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let (u, s, v) = svd(m);
    let s: Vec<f64> = s.iter().map(|v| (v - t).max(0.0)).collect();
    u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s)) * v.transpose()
}

/// Accelerated proximal gradient on `(λ/2)‖X − XC‖² + ‖C‖_*`.
fn fista(x: &DMatrix<f64>, lambda: f64, iters: usize) -> DMatrix<f64> {
    let n = x.ncols();
    let gram = x.transpose() * x;
    let sigma1 = svd(x).1[0];
    let step = 1.0 / (lambda * sigma1 * sigma1);
    let mut c = DMatrix::zeros(n, n);
    let mut z = c.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let grad = (&gram * &z - &gram) * lambda;
        let next = svt(&(&z - grad * step), step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = &next + (&next - &c) * ((t - 1.0) / t_next);
        c = next;
        t = t_next;
    }
    c
}

#[test]
fn noisy_closed_form_matches_proximal_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let x = gaussian(&mut rng, 20, 40);
    let lambda = 0.05;
    let closed = lrr_noisy(&x, lambda).unwrap();
    assert!(!closed.active_set.is_empty() && closed.active_set.len() < 20);
    let oracle = fista(&x, lambda, 4000);
    let rel = (&closed.c - &oracle).norm() / oracle.norm();
    assert!(rel <= 1e-4, "relative gap {rel:e}");
    assert!(objective(&x, &closed.c, lambda) <= objective(&x, &oracle, lambda) + 1e-9);
}

#[test]
fn noisy_is_zero_when_every_direction_is_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = gaussian(&mut rng, 5, 8) * 1e-3;
    let sol = lrr_noisy(&x, 1.0).unwrap();
    assert_eq!(sol.c, DMatrix::zeros(8, 8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noiseless_self_expression(seed in any::<u64>(), n in 4usize..20, r in 1usize..6, extra in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = r.min(n);
        let x = gaussian(&mut rng, n, r) * gaussian(&mut rng, r, r + 1 + extra);
        let sol = lrr_noiseless(&x).unwrap();
        prop_assert_eq!(sol.active_set.len(), r);
        prop_assert!((&x - &x * &sol.c).norm() / x.norm() <= 1e-8);
        // orthogonal projector onto the row space
        prop_assert!((&sol.c * &sol.c - &sol.c).amax() <= 1e-10);
        prop_assert!((&sol.c - sol.c.transpose()).amax() <= 1e-12);
    }

    #[test]
    fn noisy_shrinks_toward_noiseless(seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(&mut rng, 8, 12);
        let noisy = lrr_noisy(&x, lambda).unwrap().c;
        let full = lrr_noiseless(&x).unwrap().c;
        // noisy C = V diag(d) Vᵀ with 0 ≤ d < 1, so full − noisy is PSD and C(full − C) = C − C² ⪰ 0
        let gap = &full - &noisy;
        let eig = SortedEigen::new(&(&gap + gap.transpose()).scale(0.5)).unwrap();
        prop_assert!(eig.values[0] >= -1e-10);
        prop_assert!(nuclear(&noisy) <= nuclear(&full) + 1e-9);
    }
}

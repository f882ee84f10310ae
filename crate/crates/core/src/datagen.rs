//! Synthetic union-of-subspaces data.
//!
//! Bases are cut from a shared orthonormal pool of `union_rank` directions.
//! Subspace `i` takes the `d` pool columns `(i·s + j) mod R`, with the stride
//! `s = ⌈(R − d)/(L − 1)⌉` chosen so the windows cover the whole pool, and then
//! applies its own random rotation inside that span. Consecutive subspaces
//! therefore share directions and the stacked basis has rank exactly `R`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{invalid_input, invalid_param, Result};
use crate::spectral::ClusterLabels;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub num_subspaces: usize,
    pub points_per_subspace: usize,
    pub noise_variance: f64,
    pub union_rank: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// n = 100, d = 5, L = 3, rank 10.
    pub fn benchmark(points_per_subspace: usize, noise_variance: f64, seed: u64) -> Self {
        Self {
            ambient_dim: 100,
            subspace_dim: 5,
            num_subspaces: 3,
            points_per_subspace,
            noise_variance,
            union_rank: 10,
            seed,
        }
    }

    pub fn num_points(&self) -> usize {
        self.num_subspaces * self.points_per_subspace
    }

    /// Pool column windows, one per subspace.
    fn windows(&self) -> Result<Vec<Vec<usize>>> {
        let (n, d, l, r) = (
            self.ambient_dim,
            self.subspace_dim,
            self.num_subspaces,
            self.union_rank,
        );
        if d == 0 || l == 0 || self.points_per_subspace == 0 {
            return Err(invalid_param(
                "subspace dimension, subspace count and points per subspace must be positive",
            ));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(invalid_param(format!(
                "noise variance must be a finite nonnegative number, got {}",
                self.noise_variance
            )));
        }
        if r < d || r > d * l {
            return Err(invalid_param(format!(
                "union rank {r} must lie between d = {d} and d·L = {}",
                d * l
            )));
        }
        if n < r {
            return Err(invalid_param(format!(
                "ambient dimension {n} is below the union rank {r}"
            )));
        }
        if l == 1 {
            return Ok(vec![(0..d).collect()]);
        }
        if r == d {
            return Err(invalid_param(
                "union rank equal to d makes every subspace identical",
            ));
        }
        let stride = (r - d).div_ceil(l - 1);
        let windows: Vec<Vec<usize>> = (0..l)
            .map(|i| (0..d).map(|j| (i * stride + j) % r).collect())
            .collect();
        let distinct: BTreeSet<BTreeSet<usize>> = windows
            .iter()
            .map(|w| w.iter().copied().collect())
            .collect();
        if distinct.len() != l {
            return Err(invalid_param(format!(
                "no overlap pattern gives {l} distinct {d}-dimensional subspaces of a rank-{r} union"
            )));
        }
        let covered: BTreeSet<usize> = windows.iter().flatten().copied().collect();
        if covered.len() != r {
            return Err(invalid_param(format!(
                "overlap pattern reaches rank {} instead of {r}",
                covered.len()
            )));
        }
        Ok(windows)
    }

    pub fn validate(&self) -> Result<()> {
        self.windows().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub x: DMatrix<f64>,
    pub truth: ClusterLabels,
}

impl LabeledDataset {
    pub fn new(x: DMatrix<f64>, truth: ClusterLabels) -> Result<Self> {
        if x.ncols() != truth.len() {
            return Err(invalid_input(format!(
                "{} data columns but {} labels",
                x.ncols(),
                truth.len()
            )));
        }
        Ok(Self { x, truth })
    }
}

/// A generated dataset together with the orthonormal bases behind it.
#[derive(Debug, Clone)]
pub struct SyntheticSample {
    pub dataset: LabeledDataset,
    pub bases: Vec<DMatrix<f64>>,
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    gaussian(rng, rows, cols).qr().q()
}

pub fn generate_synthetic_with_bases(spec: &SyntheticSpec) -> Result<SyntheticSample> {
    let windows = spec.windows()?;
    let (n, d, per) = (spec.ambient_dim, spec.subspace_dim, spec.points_per_subspace);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pool = orthonormal(&mut rng, n, spec.union_rank);

    let mut bases = Vec::with_capacity(windows.len());
    let mut x = DMatrix::zeros(n, spec.num_points());
    let mut truth = Vec::with_capacity(spec.num_points());
    for (i, window) in windows.iter().enumerate() {
        let span = pool.select_columns(window);
        let rotation = orthonormal(&mut rng, d, d);
        let basis = span * rotation;
        let coeffs = gaussian(&mut rng, d, per);
        x.columns_mut(i * per, per).copy_from(&(&basis * coeffs));
        truth.extend(std::iter::repeat_n(i, per));
        bases.push(basis);
    }
    let noise_seed: u64 = rng.random();
    let x = add_gaussian_noise(&x, spec.noise_variance, noise_seed)?;
    Ok(SyntheticSample {
        dataset: LabeledDataset {
            x,
            truth: ClusterLabels::new(truth, spec.num_subspaces)?,
        },
        bases,
    })
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    generate_synthetic_with_bases(spec).map(|s| s.dataset)
}

/// `X + E` with `E` i.i.d. `N(0, variance)`; `variance = 0` returns `X` unchanged.
pub fn add_gaussian_noise(x: &DMatrix<f64>, variance: f64, seed: u64) -> Result<DMatrix<f64>> {
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(invalid_param(format!(
            "noise variance must be a finite nonnegative number, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(x.clone());
    }
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| invalid_param(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(x.map(|v| v + normal.sample(&mut rng)))
}

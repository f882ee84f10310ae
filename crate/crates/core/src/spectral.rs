//! Affinity construction and normalized spectral clustering.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::linalg::{ensure_finite, SortedEigen};

const DEGREE_FLOOR: f64 = 1e-12;
const KMEANS_REPLICATES: u64 = 20;
const KMEANS_MAX_ITERS: usize = 300;
const KMEANS_REL_TOL: f64 = 1e-9;

/// Symmetric nonnegative similarity matrix `|C| + |C|ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix(DMatrix<f64>);

impl AffinityMatrix {
    /// Wraps an existing matrix after checking it is square, finite,
    /// nonnegative and exactly symmetric.
    pub fn from_matrix(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(invalid_input(format!(
                "affinity must be square, got {}×{}",
                w.nrows(),
                w.ncols()
            )));
        }
        ensure_finite(&w, "affinity")?;
        if w.iter().any(|&v| v < 0.0) {
            return Err(invalid_input("affinity has negative entries"));
        }
        if w != w.transpose() {
            return Err(invalid_input("affinity is not symmetric"));
        }
        Ok(Self(w))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl ClusterLabels {
    pub fn new(labels: Vec<usize>, num_clusters: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_clusters) {
            return Err(invalid_input(format!(
                "label {bad} out of range for {num_clusters} clusters"
            )));
        }
        Ok(Self {
            labels,
            num_clusters,
        })
    }

    /// Uses `max + 1` as the cluster count (zero for an empty vector).
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let num_clusters = labels.iter().max().map_or(0, |m| m + 1);
        Self {
            labels,
            num_clusters,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn build_affinity(c: &DMatrix<f64>) -> Result<AffinityMatrix> {
    if !c.is_square() {
        return Err(invalid_input(format!(
            "representation must be square, got {}×{}",
            c.nrows(),
            c.ncols()
        )));
    }
    ensure_finite(c, "representation")?;
    let a = c.abs();
    Ok(AffinityMatrix(&a + a.transpose()))
}

/// Row-normalized embedding from the `l` eigenvectors of
/// `I − D^{-1/2} W D^{-1/2}` with the smallest eigenvalues.
pub fn spectral_embedding(w: &AffinityMatrix, l: usize) -> Result<DMatrix<f64>> {
    let n = w.len();
    if l == 0 || l > n {
        return Err(invalid_param(format!(
            "cluster count must be in 1..={n}, got {l}"
        )));
    }
    let w = w.matrix();
    if w.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateAffinity("affinity matrix is all zero".into()));
    }
    let inv_sqrt: Vec<f64> = w
        .row_iter()
        .map(|r| 1.0 / r.sum().max(DEGREE_FLOOR).sqrt())
        .collect();
    let lap = DMatrix::from_fn(n, n, |i, j| {
        let off = -inv_sqrt[i] * w[(i, j)] * inv_sqrt[j];
        if i == j {
            1.0 + off
        } else {
            off
        }
    });
    // symmetrize away rounding so the eigen-solver sees an exactly symmetric input
    let lap = (&lap + lap.transpose()) * 0.5;
    let eig = SortedEigen::new(&lap)?;
    let mut emb = eig.vectors.columns(0, l).into_owned();
    for mut row in emb.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    Ok(emb)
}

/// Spectral clustering with k-means++ seeded k-means on the embedding.
///
/// Twenty replicates run with generators derived from `seed`; the lowest
/// inertia wins, ties going to the lowest replicate index.
pub fn spectral_cluster(w: &AffinityMatrix, l: usize, seed: u64) -> Result<ClusterLabels> {
    let emb = spectral_embedding(w, l)?;
    if l == 1 {
        return ClusterLabels::new(vec![0; w.len()], 1);
    }
    let points: Vec<Vec<f64>> = emb
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect();
    let labels = kmeans(&points, l, seed).labels;
    ClusterLabels::new(labels, l)
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centers.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[idx].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>) -> KMeansResult {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels = vec![0; points.len()];
    let mut prev = f64::INFINITY;
    let mut inertia = f64::INFINITY;
    for _ in 0..KMEANS_MAX_ITERS {
        let mut dists = vec![0.0; points.len()];
        inertia = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            labels[i] = c;
            dists[i] = d;
            inertia += d;
        }
        if prev.is_finite() && prev - inertia <= KMEANS_REL_TOL * prev {
            break;
        }
        prev = inertia;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&labels) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed an empty cluster at the point farthest from its center
                let far = (0..points.len())
                    .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                centers[c] = points[far].clone();
                dists[far] = 0.0;
            } else {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    KMeansResult { labels, inertia }
}

/// k-means with k-means++ initialization, best of twenty replicates.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> KMeansResult {
    assert!(k >= 1 && k <= points.len(), "k must be in 1..=N");
    let runs: Vec<KMeansResult> = (0..KMEANS_REPLICATES)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep);
            lloyd(points, plus_plus_init(points, k, &mut rng))
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.inertia < runs[best].inertia {
            best = i;
        }
    }
    runs.into_iter().nth(best).expect("at least one replicate")
}

//! Clustering error and hyperparameter search.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::datagen::LabeledDataset;
use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::pipeline::{cluster, Algorithm, RunSettings};
use crate::spectral::ClusterLabels;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Fraction of points misassigned under the best label matching.
    pub ce: f64,
    /// `matching[p]` is the truth label assigned to predicted label `p`.
    pub matching: Vec<usize>,
    /// Distinct truth labels minus distinct predicted labels, when positive.
    pub missing_clusters: usize,
}

/// Minimum-cost perfect matching on a square matrix (Hungarian method,
/// `O(k³)`). Returns `assign[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let k = cost.len();
    if k == 0 {
        return Vec::new();
    }
    // potentials and matches are 1-based; index 0 is the virtual start column
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![i64::MAX; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = i64::MAX;
            let mut next = 0;
            for col in 1..=k {
                if used[col] {
                    continue;
                }
                let reduced = cost[r - 1][col - 1] - u[r] - v[col];
                if reduced < minv[col] {
                    minv[col] = reduced;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    next = col;
                }
            }
            for col in 0..=k {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = next;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; k];
    for col in 1..=k {
        assign[owner[col] - 1] = col - 1;
    }
    assign
}

/// Minimum misassignment fraction over all one-to-one label matchings.
///
/// The confusion matrix is padded to a square of side
/// `max(pred clusters, truth clusters)`, so degenerate predictions with fewer
/// labels still get a well-defined matching.
pub fn clustering_error(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<EvalReport> {
    if pred.len() != truth.len() {
        return Err(invalid_input(format!(
            "{} predicted labels but {} truth labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(invalid_input("cannot score an empty labeling"));
    }
    let k = pred.num_clusters().max(truth.num_clusters());
    let mut confusion = vec![vec![0i64; k]; k];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        confusion[p][t] += 1;
    }
    let cost: Vec<Vec<i64>> = confusion
        .iter()
        .map(|row| row.iter().map(|&c| -c).collect())
        .collect();
    let matching = min_cost_assignment(&cost);
    let agreed: i64 = matching.iter().enumerate().map(|(p, &t)| confusion[p][t]).sum();
    let distinct = |l: &ClusterLabels| {
        let mut seen = vec![false; k];
        l.labels().iter().for_each(|&x| seen[x] = true);
        seen.into_iter().filter(|&s| s).count()
    };
    Ok(EvalReport {
        ce: 1.0 - agreed as f64 / pred.len() as f64,
        matching,
        missing_clusters: distinct(truth).saturating_sub(distinct(pred)),
    })
}

/// Result of clustering one labeled dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub ce: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Clusters `dataset` into its true number of groups and scores the result.
///
/// A representation with no nonzero entries carries no grouping and is
/// scored as a single cluster rather than treated as an error.
pub fn run_trial(
    dataset: &LabeledDataset,
    algorithm: Algorithm,
    settings: &RunSettings,
    seed: u64,
) -> Result<TrialOutcome> {
    let k = dataset.truth.num_clusters();
    let (labels, trace) = match cluster(&dataset.x, k, algorithm, settings, seed) {
        Ok(outcome) => (outcome.labels, outcome.trace),
        Err(f) if matches!(f.error, Error::DegenerateAffinity(_)) => {
            (ClusterLabels::from_labels(vec![0; dataset.truth.len()]), f.partial)
        }
        Err(f) => return Err(f.error),
    };
    Ok(TrialOutcome {
        ce: clustering_error(&labels, &dataset.truth)?.ce,
        iterations: trace.iterations(),
        converged: trace.converged(),
    })
}

/// Summary of repeated trials. `std` is the sample standard deviation
/// (zero for a single trial).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

impl TrialStats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid_input("no trial values"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, median, std })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Tune `λ` with the base `μ⁰`, then `μ⁰` at the best `λ`; once per `γ`.
    #[default]
    TwoPhase,
    Cartesian,
}

/// Candidate values. For LRR the `lambdas` are its noise weight and the
/// other axes are unused; `gammas` only matter for GMC.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lambdas: Vec<f64>,
    pub mu_inits: Vec<f64>,
    pub gammas: Vec<f64>,
    pub strategy: SearchStrategy,
}

impl GridSpec {
    /// `λ = 1/(1+α)` for `α ∈ {10⁻³, …, 10³}`, `μ⁰ ∈ {1, 3, 5, 10, 20}`.
    pub fn standard_gmc(gamma: f64) -> Self {
        Self {
            lambdas: (-3..=3)
                .map(|e| crate::admm::lambda_from_alpha(10f64.powi(e)))
                .collect(),
            mu_inits: vec![1.0, 3.0, 5.0, 10.0, 20.0],
            gammas: vec![gamma],
            strategy: SearchStrategy::TwoPhase,
        }
    }

    /// `λ ∈ {0.1, …, 0.9}`, `μ⁰ ∈ {1, 3, 5, 10, 20}`.
    pub fn standard_s0l0() -> Self {
        Self {
            lambdas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            mu_inits: vec![1.0, 3.0, 5.0, 10.0, 20.0],
            gammas: vec![1.0],
            strategy: SearchStrategy::TwoPhase,
        }
    }
}

/// Indices into the `GridSpec` axes, ordered `(λ, μ⁰, γ)`.
pub type GridCoord = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub coord: GridCoord,
    pub settings: RunSettings,
    pub trial_ce: Vec<f64>,
    pub stats: TrialStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: GridPoint,
    /// Every evaluated point, in evaluation order.
    pub table: Vec<GridPoint>,
}

fn settings_at(
    algorithm: Algorithm,
    base: &RunSettings,
    grid: &GridSpec,
    (li, mi, gi): GridCoord,
) -> RunSettings {
    let mut s = base.clone();
    if algorithm == Algorithm::Lrr {
        s.lrr_lambda = Some(grid.lambdas[li]);
        return s;
    }
    s.solver = s.solver.with_lambda(grid.lambdas[li]);
    s.solver.mu2_init = grid.mu_inits[mi];
    s.solver.mu_max = s.solver.mu_max.max(grid.mu_inits[mi]);
    if algorithm == Algorithm::Gmc {
        s.solver.gamma = grid.gammas[gi];
    }
    s
}

fn evaluate(
    coords: &[GridCoord],
    datasets: &[LabeledDataset],
    algorithm: Algorithm,
    base: &RunSettings,
    grid: &GridSpec,
    seed: u64,
) -> Result<Vec<GridPoint>> {
    let jobs: Vec<(usize, usize)> = (0..coords.len())
        .flat_map(|p| (0..datasets.len()).map(move |t| (p, t)))
        .collect();
    let ces: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(p, t)| {
            let settings = settings_at(algorithm, base, grid, coords[p]);
            run_trial(&datasets[t], algorithm, &settings, seed).map(|o| o.ce)
        })
        .collect();
    let mut ces = ces.into_iter();
    coords
        .iter()
        .map(|&coord| {
            let trial_ce = ces.by_ref().take(datasets.len()).collect::<Result<Vec<_>>>()?;
            Ok(GridPoint {
                coord,
                settings: settings_at(algorithm, base, grid, coord),
                stats: TrialStats::from_values(&trial_ce)?,
                trial_ce,
            })
        })
        .collect()
}

fn argmin(points: &[GridPoint]) -> &GridPoint {
    points
        .iter()
        .min_by(|a, b| {
            a.stats
                .mean
                .total_cmp(&b.stats.mean)
                .then(a.coord.cmp(&b.coord))
        })
        .expect("nonempty grid")
}

/// Picks the grid point with the lowest mean clustering error over
/// `datasets`, ties going to the lexicographically smallest coordinates.
/// Points run in parallel; results do not depend on scheduling.
pub fn grid_search(
    datasets: &[LabeledDataset],
    algorithm: Algorithm,
    base: &RunSettings,
    grid: &GridSpec,
    seed: u64,
) -> Result<GridResult> {
    if datasets.is_empty() {
        return Err(invalid_param("grid search needs at least one dataset"));
    }
    if grid.lambdas.is_empty() {
        return Err(invalid_param("λ grid is empty"));
    }
    let uses_mu = algorithm != Algorithm::Lrr;
    let uses_gamma = algorithm == Algorithm::Gmc;
    if uses_mu && grid.mu_inits.is_empty() {
        return Err(invalid_param("μ⁰ grid is empty"));
    }
    if uses_gamma && grid.gammas.is_empty() {
        return Err(invalid_param("γ grid is empty"));
    }
    let n_mu = if uses_mu { grid.mu_inits.len() } else { 1 };
    let n_gamma = if uses_gamma { grid.gammas.len() } else { 1 };
    // evaluate against a grid whose unused axes still hold one index-0 value
    let mut grid = grid.clone();
    if !uses_mu {
        grid.mu_inits = vec![base.solver.mu2_init];
    }
    if !uses_gamma {
        grid.gammas = vec![base.solver.gamma];
    }

    let table = match grid.strategy {
        SearchStrategy::Cartesian => {
            let coords: Vec<GridCoord> = (0..grid.lambdas.len())
                .flat_map(|l| (0..n_mu).flat_map(move |m| (0..n_gamma).map(move |g| (l, m, g))))
                .collect();
            evaluate(&coords, datasets, algorithm, base, &grid, seed)?
        }
        SearchStrategy::TwoPhase => {
            // phase one holds μ⁰ at the base value, which may sit outside the μ⁰ axis
            let mut phase_grid = grid.clone();
            let base_mu = phase_grid.mu_inits.len();
            phase_grid.mu_inits.push(base.solver.mu2_init);
            let mut table = Vec::new();
            for g in 0..n_gamma {
                let first: Vec<GridCoord> =
                    (0..grid.lambdas.len()).map(|l| (l, base_mu, g)).collect();
                let mut first = evaluate(&first, datasets, algorithm, base, &phase_grid, seed)?;
                let best_l = argmin(&first).coord.0;
                let second: Vec<GridCoord> = (0..n_mu).map(|m| (best_l, m, g)).collect();
                let second = evaluate(&second, datasets, algorithm, base, &phase_grid, seed)?;
                table.append(&mut first);
                table.extend(second);
            }
            table
        }
    };
    let best = argmin(&table).clone();
    Ok(GridResult { best, table })
}

/// Confusion counts, `[pred][truth]`.
pub fn confusion_matrix(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<DMatrix<usize>> {
    if pred.len() != truth.len() {
        return Err(invalid_input("label vectors differ in length"));
    }
    let mut m = DMatrix::zeros(pred.num_clusters(), truth.num_clusters());
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        m[(p, t)] += 1;
    }
    Ok(m)
}

mod config;
mod report;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lrssc::datagen::{generate_synthetic, SyntheticSpec};
use lrssc::eval::clustering_error;
use lrssc::io::{load_labels, load_matrix, save_labels, save_matrix};
use lrssc::linalg::numerical_rank;
use lrssc::pipeline::{cluster, Algorithm};

use crate::config::SolverFlags;

#[derive(Parser)]
#[command(name = "lrssc", version, about = "Low-rank sparse subspace clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a union-of-subspaces dataset (X.csv, labels.txt).
    Synth(SynthArgs),
    /// Run a solver end to end and write labels, trace and KKT residuals.
    Cluster(ClusterArgs),
    /// Clustering error of predicted labels against ground truth.
    Eval(EvalArgs),
    /// Clustering error over points-per-subspace × noise-variance × algorithm.
    Sweep(sweep::SweepArgs),
}

#[derive(Args, Clone)]
pub(crate) struct DataShape {
    /// Ambient dimension.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Subspace dimension.
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// Number of subspaces.
    #[arg(long = "L", default_value_t = 3)]
    num_subspaces: usize,
    /// Rank of the union of subspaces.
    #[arg(long, default_value_t = 10)]
    rank: usize,
}

impl DataShape {
    pub(crate) fn spec(&self, per: usize, var: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            ambient_dim: self.n,
            subspace_dim: self.d,
            num_subspaces: self.num_subspaces,
            points_per_subspace: per,
            noise_variance: var,
            union_rank: self.rank,
            seed,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    shape: DataShape,
    /// Points per subspace.
    #[arg(long, default_value_t = 50)]
    per: usize,
    /// Noise variance.
    #[arg(long, default_value_t = 0.0)]
    var: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Existing directory to write X.csv and labels.txt into.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    /// Data matrix, one feature per line, one point per column.
    #[arg(long)]
    input: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    clusters: usize,
    #[arg(long, default_value = "gmc", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Existing directory for labels.txt, trace.csv and kkt.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Ground-truth labels; when given, the clustering error is printed.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// TOML file of solver settings. Flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the k-means replicates.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

pub(crate) fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: lrssc::Error| e.to_string())
}

fn require_dir(dir: &Path) -> Result<()> {
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    require_dir(&args.out_dir)?;
    let spec = args.shape.spec(args.per, args.var, args.seed);
    let ds = generate_synthetic(&spec)?;
    save_matrix(args.out_dir.join("X.csv"), &ds.x)?;
    save_labels(args.out_dir.join("labels.txt"), &ds.truth)?;
    let rank = numerical_rank(&ds.x, 1e-10)?;
    println!("rank {rank}");
    eprintln!(
        "wrote {}x{} data and {} labels to {}",
        ds.x.nrows(),
        ds.x.ncols(),
        ds.truth.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn run_cluster(args: ClusterArgs) -> Result<()> {
    require_dir(&args.out_dir)?;
    let settings = config::resolve(args.algorithm, args.config.as_deref(), &args.solver)?;
    let x = load_matrix(&args.input)?;
    let truth = args.truth.as_deref().map(load_labels).transpose()?;

    let trace_path = args.out_dir.join("trace.csv");
    let outcome = match cluster(&x, args.clusters, args.algorithm, &settings, args.seed) {
        Ok(o) => o,
        Err(failure) => {
            report::write_trace(&trace_path, &failure.partial)?;
            return Err(failure.error).with_context(|| {
                format!(
                    "{} failed after {} iterations; partial trace in {}",
                    args.algorithm,
                    failure.partial.iterations(),
                    trace_path.display()
                )
            });
        }
    };
    save_labels(args.out_dir.join("labels.txt"), &outcome.labels)?;
    report::write_trace(&trace_path, &outcome.trace)?;
    report::write_kkt(&args.out_dir.join("kkt.csv"), &outcome.trace)?;
    eprintln!(
        "{}: {} after {} iterations",
        args.algorithm,
        outcome.trace.termination,
        outcome.trace.iterations()
    );
    if outcome.trace.knee_adjusted {
        eprintln!("note: gamma = 1 makes the firm knees coincide; the upper knee was nudged up");
    }
    if let Some(truth) = truth {
        let ce = clustering_error(&outcome.labels, &truth)?.ce;
        println!("ce {ce}");
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let pred = load_labels(&args.pred)?;
    let truth = load_labels(&args.truth)?;
    let report = clustering_error(&pred, &truth)?;
    println!("pred,truth,ce,missing_clusters");
    println!(
        "{},{},{},{}",
        args.pred.display(),
        args.truth.display(),
        report.ce,
        report.missing_clusters
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Cluster(a) => run_cluster(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

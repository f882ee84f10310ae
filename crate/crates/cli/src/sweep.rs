use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use lrssc::datagen::generate_synthetic;
use lrssc::eval::run_trial;
use lrssc::pipeline::{Algorithm, RunSettings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{parse_algorithm, DataShape};

pub const SWEEP_HEADER: &str = "algorithm,per,var,trial,ce,iters,seconds";

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    shape: DataShape,
    /// Points per subspace, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "50,100")]
    per: Vec<usize>,
    /// Noise variances, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.3")]
    var: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gmc,s0l0,lrssc-convex",
        value_parser = parse_algorithm
    )]
    algorithms: Vec<Algorithm>,
    /// Trials per grid cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

struct Cell {
    per: usize,
    var: f64,
    trial: usize,
    seed: u64,
}

/// Every (per, var, trial) cell in output order, each with its own data seed.
fn cells(args: &SweepArgs) -> Vec<Cell> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = Vec::new();
    for &per in &args.per {
        for &var in &args.var {
            for trial in 0..args.trials {
                out.push(Cell {
                    per,
                    var,
                    trial,
                    seed: rng.random(),
                });
            }
        }
    }
    out
}

pub fn run(args: SweepArgs) -> Result<()> {
    let cells = cells(&args);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("building worker pool")?;
    let rows: Vec<Result<Vec<String>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let ds = generate_synthetic(&args.shape.spec(cell.per, cell.var, cell.seed))?;
                args.algorithms
                    .iter()
                    .map(|&alg| {
                        let start = Instant::now();
                        let o = run_trial(&ds, alg, &RunSettings::defaults_for(alg), cell.seed)
                            .with_context(|| {
                                format!("{alg} on per={} var={} trial={}", cell.per, cell.var, cell.trial)
                            })?;
                        Ok(format!(
                            "{alg},{},{},{},{},{},{:.3}",
                            cell.per,
                            cell.var,
                            cell.trial,
                            o.ce,
                            o.iterations,
                            start.elapsed().as_secs_f64()
                        ))
                    })
                    .collect()
            })
            .collect()
    });

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for group in rows {
        for row in group? {
            let _ = writeln!(out, "{row}");
        }
    }
    std::fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "{} rows written to {}",
        cells.len() * args.algorithms.len(),
        args.out.display()
    );
    Ok(())
}

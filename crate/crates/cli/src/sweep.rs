use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use rayon::prelude::*;
use sparse_gmrf::eval::avg_loglik;
use sparse_gmrf::synth::{log_grid, tikhonov_precision};
use sparse_gmrf::ElementwisePenalty;

use crate::input;
use crate::solve::SolverArgs;
use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    /// Training covariance file.
    #[arg(long)]
    pub cov: Option<PathBuf>,
    /// Training samples, one observation per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Known mean to center both datasets on.
    #[arg(long)]
    pub mean: Option<PathBuf>,
    /// Test covariance file.
    #[arg(long)]
    pub test_cov: Option<PathBuf>,
    /// Test samples.
    #[arg(long)]
    pub test_data: Option<PathBuf>,
    /// Explicit comma-separated λ values (overrides the default grid).
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Number of log-spaced grid points from max |Σ̂_ij| down to --lambda-min.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 0.0)]
    pub diag_lambda: f64,
    /// Also score the ridge estimate (Σ̂ + νI)⁻¹ with ν taken from the same grid.
    #[arg(long)]
    pub tikhonov: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory for sweep.tsv (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    lambda: f64,
    edges: usize,
    objective: f64,
    test_loglik: f64,
    gap: f64,
    iterations: usize,
    termination: String,
    tikhonov: Option<f64>,
}

pub fn run(args: Args) -> Result<Status> {
    let opts = args.solver.options()?;
    let train = input::covariance(args.cov.as_deref(), args.data.as_deref(), args.mean.as_deref())?;
    let test = input::covariance(args.test_cov.as_deref(), args.test_data.as_deref(), args.mean.as_deref())?;
    if test.dim() != train.dim() {
        bail!("train is {}-dimensional but test is {}-dimensional", train.dim(), test.dim());
    }
    let grid = match args.lambdas {
        Some(g) => g,
        None => log_grid(train.max_abs_off_diagonal(), args.lambda_min, args.points),
    };
    if grid.is_empty() {
        bail!("empty λ grid");
    }
    let n = train.dim();

    // par_iter keeps grid order in the collected output.
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&lambda| -> Result<Row> {
            let p = ElementwisePenalty::uniform(n, lambda, args.diag_lambda)?;
            let sol = sparse_gmrf::solve_box(&train, &p, &opts)?;
            let tikhonov = if args.tikhonov {
                let k = tikhonov_precision(train.matrix(), lambda)?;
                Some(avg_loglik(&test, k.view())?)
            } else {
                None
            };
            Ok(Row {
                lambda,
                edges: sol.estimate.edges.len(),
                objective: *sol.report.objectives.last().expect("start point recorded"),
                test_loglik: avg_loglik(&test, sol.estimate.k.view())?,
                gap: sol.report.final_gap(),
                iterations: sol.report.iterations,
                termination: format!("{:?}", sol.report.termination),
                tikhonov,
            })
        })
        .collect::<Result<_>>()?;

    let mut table = String::from("lambda\tedges\ttrain_objective\ttest_loglik\tgap\titerations\ttermination");
    if args.tikhonov {
        table.push_str("\ttikhonov_nu\ttikhonov_loglik");
    }
    table.push('\n');
    for r in &rows {
        write!(
            table,
            "{:.6e}\t{}\t{:.10e}\t{:.10e}\t{:.3e}\t{}\t{}",
            r.lambda, r.edges, r.objective, r.test_loglik, r.gap, r.iterations, r.termination
        )?;
        if let Some(t) = r.tikhonov {
            write!(table, "\t{:.6e}\t{:.10e}", r.lambda, t)?;
        }
        table.push('\n');
    }
    match &args.out {
        Some(dir) => {
            input::ensure_dir(dir)?;
            input::write(dir, "sweep.tsv", &table)?;
        }
        None => std::io::stdout().write_all(table.as_bytes())?,
    }
    Ok(Status::Ok)
}

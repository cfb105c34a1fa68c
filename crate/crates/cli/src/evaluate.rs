use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;
use sparse_gmrf::eval::{avg_loglik, structure_metrics, StructureMetrics};
use sparse_gmrf::PrecisionEstimate;

use crate::input;
use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    /// Precision matrix to score.
    #[arg(long)]
    pub precision: PathBuf,
    /// Test covariance file.
    #[arg(long)]
    pub test_cov: Option<PathBuf>,
    /// Test samples.
    #[arg(long)]
    pub test_data: Option<PathBuf>,
    #[arg(long)]
    pub mean: Option<PathBuf>,
    /// True edge list (`i j ...` per line).
    #[arg(long)]
    pub truth_edges: Option<PathBuf>,
    /// Recovered edge list (default: nonzero off-diagonals of --precision).
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Output directory for evaluation.json (default: print to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Evaluation {
    test_loglik: Option<f64>,
    structure: Option<StructureMetrics>,
}

pub fn run(args: Args) -> Result<Status> {
    let k = input::read_matrix(&args.precision)?;
    if k.nrows() != k.ncols() {
        bail!("{}: precision must be square, found {:?}", args.precision.display(), k.dim());
    }
    let test_loglik = match (&args.test_cov, &args.test_data) {
        (None, None) => None,
        (cov, data) => {
            let test = input::covariance(cov.as_deref(), data.as_deref(), args.mean.as_deref())?;
            Some(avg_loglik(&test, k.view())?)
        }
    };
    let structure = match &args.truth_edges {
        Some(path) => {
            let truth = input::read_edges(path)?;
            let recovered = match &args.edges {
                Some(p) => input::read_edges(p)?,
                None => PrecisionEstimate::from_support(k.clone(), 0.0).edges,
            };
            Some(structure_metrics(&truth, &recovered))
        }
        None => None,
    };
    if test_loglik.is_none() && structure.is_none() {
        bail!("nothing to evaluate: give --test-cov/--test-data and/or --truth-edges");
    }
    let json = serde_json::to_string_pretty(&Evaluation { test_loglik, structure })?;
    match &args.out {
        Some(dir) => {
            input::ensure_dir(dir)?;
            input::write(dir, "evaluation.json", &json)?;
        }
        None => std::io::Write::write_all(&mut std::io::stdout(), format!("{json}\n").as_bytes())?,
    }
    Ok(Status::Ok)
}

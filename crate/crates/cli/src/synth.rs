use std::path::PathBuf;

use anyhow::{bail, Result};
use ndarray::Array1;
use sparse_gmrf::synth::{random_precision_with_density, random_sparse_precision, sample_gaussian, GaussianModel};

use crate::input;
use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    pub n: usize,
    /// Average number of edges per variable.
    #[arg(long, conflicts_with = "density", required_unless_present = "density")]
    pub edges_per_node: Option<f64>,
    /// Fraction of variable pairs that are edges.
    #[arg(long)]
    pub density: Option<f64>,
    /// Training samples.
    #[arg(long)]
    pub m: usize,
    /// Test samples (default: same as --m).
    #[arg(long)]
    pub m_test: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: Args) -> Result<Status> {
    if args.n == 0 || args.m == 0 {
        bail!("--n and --m must be positive");
    }
    let truth = match (args.edges_per_node, args.density) {
        (Some(epn), None) => random_sparse_precision(args.n, epn, args.seed)?,
        (None, Some(d)) => random_precision_with_density(args.n, d, args.seed)?,
        _ => unreachable!("clap enforces exactly one"),
    };
    let m_test = args.m_test.unwrap_or(args.m);
    let model = GaussianModel::new(Array1::zeros(args.n), truth)?;
    // A distinct stream from the one that drew the precision.
    let data = sample_gaussian(&model, args.m + m_test, args.seed ^ 0x5eed_f00d)?;

    input::ensure_dir(&args.out)?;
    input::write_matrix(&args.out, "truth_precision.txt", &model.precision.k)?;
    input::write(&args.out, "truth_edges.txt", &input::format_edges(&model.precision))?;
    input::write_matrix(&args.out, "data.txt", data.samples())?;
    if m_test > 0 {
        let (train, test) = data.split(args.m)?;
        input::write_matrix(&args.out, "train.txt", train.samples())?;
        input::write_matrix(&args.out, "test.txt", test.samples())?;
    } else {
        input::write_matrix(&args.out, "train.txt", data.samples())?;
    }
    Ok(Status::Ok)
}

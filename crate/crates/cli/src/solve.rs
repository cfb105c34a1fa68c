use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ndarray::Array1;
use serde::Serialize;
use sparse_gmrf::io::parse_blocks;
use sparse_gmrf::synth::calibrate_lambda;
use sparse_gmrf::{
    blocks_from_groups, solve_block, solve_box, BlockPenalty, ElementwisePenalty, EmpiricalCovariance,
    SolveOptions, SolveReport, Solution, Termination,
};

use crate::input;
use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    /// Empirical covariance matrix file.
    #[arg(long)]
    pub cov: Option<PathBuf>,
    /// Sample matrix file, one observation per row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Known mean to center --data on (default: the sample mean).
    #[arg(long)]
    pub mean: Option<PathBuf>,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args)]
pub struct PenaltyArgs {
    /// Off-diagonal λ for every pair; with --blocks, the radius of pairs no
    /// block covers.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Full symmetric λ matrix, diagonal included.
    #[arg(long, conflicts_with_all = ["lambda", "blocks", "groups", "diag_lambda", "target_edges"])]
    pub lambda_file: Option<PathBuf>,
    /// Block file: one `radius i,j i,j ...` line per block.
    #[arg(long, conflicts_with = "groups")]
    pub blocks: Option<PathBuf>,
    /// Group file: one line of variable indices per group.
    #[arg(long, requires = "group_scale")]
    pub groups: Option<PathBuf>,
    /// Per-pair budget for --groups; each block gets scale × its pair count.
    #[arg(long)]
    pub group_scale: Option<f64>,
    /// Diagonal λ_ii.
    #[arg(long, default_value_t = 0.0)]
    pub diag_lambda: f64,
    /// Pick a uniform λ by bisection so roughly this many edges survive.
    #[arg(long, conflicts_with_all = ["lambda", "blocks", "groups"])]
    pub target_edges: Option<usize>,
}

#[derive(clap::Args, Clone, Copy)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.1)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl SolverArgs {
    pub fn options(self) -> Result<SolveOptions> {
        let opts = SolveOptions::default().with_gap_tol(self.gap_tol).with_max_iter(self.max_iter);
        opts.validate()?;
        Ok(opts)
    }
}

pub enum Penalty {
    Elementwise(ElementwisePenalty),
    Block(BlockPenalty),
}

impl Penalty {
    pub fn solve(&self, cov: &EmpiricalCovariance, opts: &SolveOptions) -> sparse_gmrf::Result<Solution> {
        match self {
            Penalty::Elementwise(p) => solve_box(cov, p, opts),
            Penalty::Block(p) => solve_block(cov, p, opts),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Penalty::Elementwise(_) => "elementwise",
            Penalty::Block(_) => "block",
        }
    }
}

/// Builds the penalty, returning the uniform λ when one was used.
fn build_penalty(args: &PenaltyArgs, cov: &EmpiricalCovariance, opts: &SolveOptions) -> Result<(Penalty, Option<f64>)> {
    let n = cov.dim();
    let diag = Array1::from_elem(n, args.diag_lambda);
    if let Some(path) = &args.lambda_file {
        let m = input::read_matrix(path)?;
        if m.dim() != (n, n) {
            bail!("{}: expected {n}x{n} penalty, found {:?}", path.display(), m.dim());
        }
        return Ok((Penalty::Elementwise(ElementwisePenalty::new(m)?), None));
    }
    if let Some(path) = &args.blocks {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let blocks = parse_blocks(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok((Penalty::Block(BlockPenalty::new(n, blocks, diag, args.lambda)?), None));
    }
    if let Some(path) = &args.groups {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let groups = sparse_gmrf::io::parse_groups(&text).with_context(|| format!("parsing {}", path.display()))?;
        let scale = args.group_scale.expect("clap enforces --group-scale");
        return Ok((Penalty::Block(blocks_from_groups(n, &groups, scale, diag)?), None));
    }
    if let Some(target) = args.target_edges {
        let (lambda, _) = calibrate_lambda(cov, target, args.diag_lambda, opts, 40)?;
        return Ok((Penalty::Elementwise(ElementwisePenalty::uniform(n, lambda, args.diag_lambda)?), Some(lambda)));
    }
    match args.lambda {
        Some(lambda) => Ok((Penalty::Elementwise(ElementwisePenalty::uniform(n, lambda, args.diag_lambda)?), Some(lambda))),
        None => bail!("a penalty is required: --lambda, --lambda-file, --blocks, --groups, or --target-edges"),
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    n: usize,
    penalty: &'static str,
    lambda: Option<f64>,
    options: &'a SolveOptions,
    edges: usize,
    final_gap: f64,
    wall_seconds: f64,
    #[serde(flatten)]
    report: &'a SolveReport,
}

pub fn run(args: Args) -> Result<Status> {
    let opts = args.solver.options()?;
    let cov = input::covariance(args.cov.as_deref(), args.data.as_deref(), args.mean.as_deref())?;
    let (penalty, lambda) = build_penalty(&args.penalty, &cov, &opts)?;
    let started = Instant::now();
    let sol = penalty.solve(&cov, &opts)?;
    let wall_seconds = started.elapsed().as_secs_f64();

    input::ensure_dir(&args.out)?;
    input::write_matrix(&args.out, "precision.txt", &sol.estimate.k)?;
    input::write(&args.out, "edges.txt", &input::format_edges(&sol.estimate))?;
    let report = RunReport {
        n: cov.dim(),
        penalty: penalty.kind(),
        lambda,
        options: &opts,
        edges: sol.estimate.edges.len(),
        final_gap: sol.report.final_gap(),
        wall_seconds,
        report: &sol.report,
    };
    input::write(&args.out, "report.json", &serde_json::to_string_pretty(&report)?)?;

    if sol.report.truncation_failed {
        eprintln!("warning: zeroing inactive entries broke positive definiteness; precision.txt is untruncated");
    }
    match sol.report.termination {
        Termination::GapReached => Ok(Status::Ok),
        t => {
            eprintln!("stopped with {t:?} at gap {:.3e} (tolerance {:.3e})", sol.report.final_gap(), opts.gap_tol);
            Ok(Status::NotConverged)
        }
    }
}

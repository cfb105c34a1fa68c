use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use ndarray::{s, Array1};
use sparse_gmrf::eval::classify;
use sparse_gmrf::synth::GaussianModel;
use sparse_gmrf::PrecisionEstimate;

use crate::input;
use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    /// Class model as LABEL=PATH; the file's first row is μ, the rest is K.
    #[arg(long = "model", required = true, value_parser = parse_model_arg)]
    pub models: Vec<(String, PathBuf)>,
    /// Labeled samples: each line is `label x_1 ... x_n`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_model_arg(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_string(), path.into())),
        _ => Err(format!("expected LABEL=PATH, got {s:?}")),
    }
}

fn load_model(path: &std::path::Path) -> Result<GaussianModel> {
    let m = input::read_matrix(path)?;
    let n = m.ncols();
    if m.nrows() != n + 1 {
        bail!("{}: expected a mean row followed by a {n}x{n} precision, found {} rows", path.display(), m.nrows());
    }
    let mean = m.row(0).to_owned();
    let k = m.slice(s![1.., ..]).to_owned();
    GaussianModel::new(mean, PrecisionEstimate::from_support(k, 0.0))
        .with_context(|| format!("model {}", path.display()))
}

fn load_labeled(path: &std::path::Path) -> Result<Vec<(String, Array1<f64>)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label = toks.next().expect("non-empty line").to_string();
        let values = toks
            .map(|t| t.parse::<f64>().with_context(|| format!("{}:{}: bad value {t:?}", path.display(), k + 1)))
            .collect::<Result<Vec<_>>>()?;
        rows.push((label, Array1::from_vec(values)));
    }
    Ok(rows)
}

pub fn run(args: Args) -> Result<Status> {
    let models = args
        .models
        .iter()
        .map(|(label, path)| Ok((label.clone(), load_model(path)?)))
        .collect::<Result<Vec<_>>>()?;
    let n = models[0].1.dim();
    if let Some((label, m)) = models.iter().find(|(_, m)| m.dim() != n) {
        bail!("model {label} is {}-dimensional, expected {n}", m.dim());
    }
    let samples = load_labeled(&args.data)?;
    let mut predictions = String::new();
    let mut pairs = Vec::with_capacity(samples.len());
    for (row, (truth, v)) in samples.iter().enumerate() {
        if v.len() != n {
            bail!("sample {} has {} values, models expect {n}", row + 1, v.len());
        }
        let predicted = classify(v.view(), &models)?;
        writeln!(predictions, "{truth}\t{predicted}")?;
        pairs.push((truth.as_str(), predicted.as_str()));
    }

    // Per class: FN rate over that class's samples, FP rate over the others.
    let mut rates = String::from("class\tsamples\tfalse_negative_rate\tfalse_positive_rate\n");
    for (label, _) in &models {
        let own = pairs.iter().filter(|(t, _)| t == label).count();
        let fn_ = pairs.iter().filter(|(t, p)| t == label && p != label).count();
        let other = pairs.len() - own;
        let fp = pairs.iter().filter(|(t, p)| t != label && p == label).count();
        let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        writeln!(rates, "{label}\t{own}\t{:.6}\t{:.6}", rate(fn_, own), rate(fp, other))?;
    }

    input::ensure_dir(&args.out)?;
    input::write(&args.out, "predictions.txt", &predictions)?;
    input::write(&args.out, "rates.tsv", &rates)?;
    std::io::Write::write_all(&mut std::io::stdout(), rates.as_bytes())?;
    Ok(Status::Ok)
}

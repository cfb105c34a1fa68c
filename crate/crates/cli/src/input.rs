//! Reading inputs and writing the shared output files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::{Array1, Array2};
use sparse_gmrf::io::{format_matrix, parse_matrix};
use sparse_gmrf::synth::{empirical_covariance, Centering, Dataset};
use sparse_gmrf::{EmpiricalCovariance, PrecisionEstimate};

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A vector stored as a single row or a single column.
pub fn read_vector(path: &Path) -> Result<Array1<f64>> {
    let m = read_matrix(path)?;
    match m.dim() {
        (1, _) => Ok(m.row(0).to_owned()),
        (_, 1) => Ok(m.column(0).to_owned()),
        (r, c) => bail!("{}: expected a single row or column, found {r}x{c}", path.display()),
    }
}

/// Covariance from `--cov`, or from `--data` centered on `--mean` (if
/// given) or the sample mean.
pub fn covariance(cov: Option<&Path>, data: Option<&Path>, mean: Option<&Path>) -> Result<EmpiricalCovariance> {
    match (cov, data) {
        (Some(path), None) => {
            if mean.is_some() {
                bail!("--mean only applies to --data");
            }
            EmpiricalCovariance::new(read_matrix(path)?).with_context(|| format!("covariance {}", path.display()))
        }
        (None, Some(path)) => {
            let data = Dataset::new(read_matrix(path)?).with_context(|| format!("dataset {}", path.display()))?;
            let mean = mean.map(read_vector).transpose()?;
            let centering = match &mean {
                Some(mu) => Centering::Given(mu.view()),
                None => Centering::FromData,
            };
            empirical_covariance(&data, centering).with_context(|| format!("covariance of {}", path.display()))
        }
        (None, None) => bail!("one of --cov or --data is required"),
        (Some(_), Some(_)) => bail!("--cov and --data are mutually exclusive"),
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_matrix(dir: &Path, name: &str, m: &Array2<f64>) -> Result<PathBuf> {
    write(dir, name, &format_matrix(m.view()))
}

/// One `i j K_ij` line per edge, 0-based, in sorted order.
pub fn format_edges(estimate: &PrecisionEstimate) -> String {
    let mut out = String::new();
    for &(i, j) in &estimate.edges {
        out.push_str(&format!("{i} {j} {:.16e}\n", estimate.k[[i, j]]));
    }
    out
}

/// Reads the first two columns of an edge file.
pub fn read_edges(path: &Path) -> Result<std::collections::BTreeSet<(usize, usize)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut edges = std::collections::BTreeSet::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let mut index = || -> Result<usize> {
            let tok = toks.next().with_context(|| format!("{}:{}: expected `i j`", path.display(), k + 1))?;
            tok.parse().with_context(|| format!("{}:{}: bad index {tok:?}", path.display(), k + 1))
        };
        let (i, j) = (index()?, index()?);
        if i == j {
            bail!("{}:{}: self-loop {i} {j}", path.display(), k + 1);
        }
        edges.insert(sparse_gmrf::model::edge(i, j));
    }
    Ok(edges)
}

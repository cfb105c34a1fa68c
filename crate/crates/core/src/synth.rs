//! Synthetic instances and baselines.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GmrfError, Result};
use crate::linalg::cholesky;
use crate::model::{EmpiricalCovariance, PrecisionEstimate};

/// Gaussian `N(μ, K⁻¹)` parameterized by its precision.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    pub mean: Array1<f64>,
    pub precision: PrecisionEstimate,
}

impl GaussianModel {
    pub fn new(mean: Array1<f64>, precision: PrecisionEstimate) -> Result<Self> {
        if mean.len() != precision.dim() {
            return Err(GmrfError::DimensionMismatch { expected: precision.dim(), found: mean.len() });
        }
        cholesky(precision.k.view())?;
        Ok(Self { mean, precision })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// `m × n` sample matrix, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Array2<f64>,
}

impl Dataset {
    pub fn new(samples: Array2<f64>) -> Result<Self> {
        if samples.nrows() == 0 {
            return Err(GmrfError::InvalidOption { name: "samples", reason: "need at least one row".into() });
        }
        Ok(Self { samples })
    }

    pub fn m(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    /// Splits into the first `m_first` rows and the rest.
    pub fn split(&self, m_first: usize) -> Result<(Dataset, Dataset)> {
        if m_first == 0 || m_first >= self.m() {
            return Err(GmrfError::InvalidOption {
                name: "split",
                reason: format!("split point {m_first} must lie in 1..{}", self.m()),
            });
        }
        let (a, b) = self.samples.view().split_at(Axis(0), m_first);
        Ok((Dataset { samples: a.to_owned() }, Dataset { samples: b.to_owned() }))
    }
}

/// Where [`empirical_covariance`] centers the samples.
#[derive(Debug, Clone, Copy)]
pub enum Centering<'a> {
    Given(ArrayView1<'a, f64>),
    FromData,
}

/// Random sparse precision with `⌊n · edges_per_node / 2⌋` uniformly chosen
/// edges, off-diagonal values uniform in `[−1, 1]`, and each diagonal set to
/// its row's absolute off-diagonal sum plus a uniform `[0.1, 1.1]` margin.
pub fn random_sparse_precision(n: usize, edges_per_node: f64, seed: u64) -> Result<PrecisionEstimate> {
    if !(edges_per_node >= 0.0) || (n > 0 && edges_per_node >= n as f64) {
        return Err(GmrfError::InvalidOption {
            name: "edges_per_node",
            reason: format!("must lie in [0, {n}), got {edges_per_node}"),
        });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let count = ((n as f64 * edges_per_node / 2.0).floor() as usize).min(pairs);
    random_precision_with_edges(n, count, seed)
}

/// Like [`random_sparse_precision`] with the fraction of off-diagonal pairs
/// that are edges given directly.
pub fn random_precision_with_density(n: usize, density: f64, seed: u64) -> Result<PrecisionEstimate> {
    if !(0.0..=1.0).contains(&density) {
        return Err(GmrfError::InvalidOption { name: "density", reason: format!("must lie in [0, 1], got {density}") });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    random_precision_with_edges(n, (pairs as f64 * density).round() as usize, seed)
}

fn random_precision_with_edges(n: usize, count: usize, seed: u64) -> Result<PrecisionEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let chosen: Vec<(usize, usize)> = sample(&mut rng, pairs.len(), count).into_iter().map(|p| pairs[p]).collect();
    Ok(precision_on_support(n, &chosen, &mut rng))
}

/// Diagonally dominant precision supported on `edges`.
pub fn precision_on_support(n: usize, edges: &[(usize, usize)], rng: &mut impl Rng) -> PrecisionEstimate {
    let mut k = Array2::<f64>::zeros((n, n));
    for &(i, j) in edges {
        let mut v: f64 = rng.random_range(-1.0..=1.0);
        if v == 0.0 {
            v = 0.5;
        }
        k[[i, j]] = v;
        k[[j, i]] = v;
    }
    for i in 0..n {
        let row: f64 = k.row(i).iter().map(|x| x.abs()).sum();
        k[[i, i]] = row + rng.random_range(0.1..=1.1);
    }
    PrecisionEstimate { k, edges: edges.iter().map(|&(i, j)| crate::model::edge(i, j)).collect() }
}

/// Draws `m` samples `x = μ + L⁻ᵀ z` with `K = L Lᵀ` and `z` standard normal.
pub fn sample_gaussian(model: &GaussianModel, m: usize, seed: u64) -> Result<Dataset> {
    if m == 0 {
        return Err(GmrfError::InvalidOption { name: "m", reason: "need at least one sample".into() });
    }
    let factor = cholesky(model.precision.k.view())?;
    let n = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Array2::<f64>::zeros((m, n));
    let mut z = vec![0.0; n];
    for mut row in samples.rows_mut() {
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        factor.solve_upper_in_place(&mut z);
        for ((x, zi), mu) in row.iter_mut().zip(&z).zip(&model.mean) {
            *x = mu + zi;
        }
    }
    Dataset::new(samples)
}

/// `(1/m) Σ (x − μ)(x − μ)ᵀ` about the given mean or the sample mean.
pub fn empirical_covariance(data: &Dataset, centering: Centering<'_>) -> Result<EmpiricalCovariance> {
    let mean = match centering {
        Centering::Given(mu) => {
            if mu.len() != data.n() {
                return Err(GmrfError::DimensionMismatch { expected: data.n(), found: mu.len() });
            }
            mu.to_owned()
        }
        Centering::FromData => {
            if data.m() < 2 {
                return Err(GmrfError::InvalidOption {
                    name: "centering",
                    reason: "sample mean needs at least two samples".into(),
                });
            }
            data.samples().mean_axis(Axis(0)).expect("non-empty")
        }
    };
    let centered = data.samples() - &mean;
    let mut cov = centered.t().dot(&centered) / data.m() as f64;
    crate::linalg::symmetrize_in_place(&mut cov);
    if let Some(index) = cov.diag().iter().position(|&d| !(d > 0.0)) {
        return Err(GmrfError::DegenerateData { index });
    }
    EmpiricalCovariance::new(cov)
}

/// Ridge-shifted model `Σ̂ + νI` with the given mean.
pub fn tikhonov(cov: &EmpiricalCovariance, nu: f64, mean: Array1<f64>) -> Result<GaussianModel> {
    let precision = tikhonov_precision(cov.matrix(), nu)?;
    GaussianModel::new(mean, PrecisionEstimate::from_support(precision, 0.0))
}

/// `(S + νI)⁻¹` for any symmetric PSD `S`.
pub fn tikhonov_precision(s: &Array2<f64>, nu: f64) -> Result<Array2<f64>> {
    if !(nu > 0.0) {
        return Err(GmrfError::InvalidOption { name: "nu", reason: format!("must be > 0, got {nu}") });
    }
    let mut shifted = s.clone();
    shifted.diag_mut().mapv_inplace(|d| d + nu);
    Ok(cholesky(shifted.view())?.inverse())
}

/// `points` log-spaced values from `hi` down to `lo`, inclusive.
pub fn log_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (hi.ln(), lo.ln());
            (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect()
        }
    }
}

/// Bisects (in log space) a uniform off-diagonal λ so the recovered edge
/// count lands as close as possible to `target`. Returns the λ and the edge
/// count reached.
pub fn calibrate_lambda(
    cov: &EmpiricalCovariance,
    target: usize,
    diag: f64,
    opts: &crate::model::SolveOptions,
    steps: usize,
) -> Result<(f64, usize)> {
    let count = |lambda: f64| -> Result<usize> {
        let p = crate::model::ElementwisePenalty::uniform(cov.dim(), lambda, diag)?;
        Ok(crate::solver_box::solve_box(cov, &p, opts)?.estimate.edges.len())
    };
    let mut hi = cov.max_abs_off_diagonal().max(1e-12);
    let mut lo = hi * 1e-4;
    let mut best = (hi, count(hi)?);
    for _ in 0..steps {
        let mid = (hi * lo).sqrt();
        let c = count(mid)?;
        if c.abs_diff(target) < best.1.abs_diff(target) {
            best = (mid, c);
        }
        if c == target {
            break;
        }
        // fewer edges than wanted → lower the penalty
        if c < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}

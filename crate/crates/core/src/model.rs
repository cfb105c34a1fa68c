//! Domain types shared by the solvers.
//!
//! Constructors validate every invariant the duality arguments rely on, so a
//! value of one of these types can be handed to a solver without rechecking.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{GmrfError, Result};
use crate::linalg;

/// Unordered variable pair, stored with `i < j`.
pub type Edge = (usize, usize);

/// Normalizes an index pair to `(min, max)`.
pub fn edge(i: usize, j: usize) -> Edge {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

fn check_square(m: ArrayView2<f64>) -> Result<usize> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(GmrfError::NotSquare { rows, cols });
    }
    for ((i, j), v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(GmrfError::NonFinite { i, j });
        }
    }
    Ok(rows)
}

/// Empirical covariance `Σ̂`: symmetric, PSD, strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCovariance {
    entries: Array2<f64>,
}

impl EmpiricalCovariance {
    /// Relative tolerance on the smallest eigenvalue.
    pub const PSD_TOLERANCE: f64 = 1e-8;

    /// Symmetrizes `entries` and validates it.
    pub fn new(mut entries: Array2<f64>) -> Result<Self> {
        let n = check_square(entries.view())?;
        linalg::symmetrize_in_place(&mut entries);
        for i in 0..n {
            let d = entries[[i, i]];
            if !(d > 0.0) {
                return Err(GmrfError::DegenerateCovariance { index: i, value: d });
            }
        }
        // λ_min ≥ -τ  ⟺  Σ̂ + τI ⪰ 0; Cholesky of the shifted matrix checks it.
        let norm = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tolerance = Self::PSD_TOLERANCE * norm;
        let mut shifted = entries.clone();
        shifted.diag_mut().mapv_inplace(|d| d + tolerance);
        if linalg::cholesky(shifted.view()).is_err() {
            return Err(GmrfError::NotPositiveSemidefinite { tolerance });
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    /// Largest off-diagonal `|Σ̂_ij|`; at or above this an elementwise
    /// penalty yields a fully sparse estimate.
    pub fn max_abs_off_diagonal(&self) -> f64 {
        let mut m = 0.0_f64;
        for ((i, j), v) in self.entries.indexed_iter() {
            if i != j {
                m = m.max(v.abs());
            }
        }
        m
    }
}

/// Elementwise penalty `λ_ij`, defining the box `|W_ij| ≤ λ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementwisePenalty {
    lambda: Array2<f64>,
}

impl ElementwisePenalty {
    pub fn new(lambda: Array2<f64>) -> Result<Self> {
        validate_elementwise(lambda.view())?;
        Ok(Self { lambda })
    }

    /// `off_diag` on every `i ≠ j`, `diag` on the diagonal.
    pub fn uniform(n: usize, off_diag: f64, diag: f64) -> Result<Self> {
        let lambda = Array2::from_shape_fn((n, n), |(i, j)| if i == j { diag } else { off_diag });
        Self::new(lambda)
    }

    /// `λ_ij = |Σ̂_ij|` off the diagonal: the smallest penalty forcing a
    /// diagonal estimate.
    pub fn full_sparsity(cov: &EmpiricalCovariance, diag: f64) -> Result<Self> {
        let lambda = Array2::from_shape_fn((cov.dim(), cov.dim()), |(i, j)| {
            if i == j {
                diag
            } else {
                cov.matrix()[[i, j]].abs()
            }
        });
        Self::new(lambda)
    }

    pub fn dim(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.lambda
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lambda[[i, j]]
    }
}

fn validate_elementwise(lambda: ArrayView2<f64>) -> Result<()> {
    let n = check_square(lambda)?;
    for i in 0..n {
        for j in 0..n {
            let v = lambda[[i, j]];
            if v != lambda[[j, i]] {
                return Err(GmrfError::AsymmetricPenalty { i, j });
            }
            if i == j {
                if v < 0.0 {
                    return Err(GmrfError::NegativeDiagonalPenalty { index: i, value: v });
                }
            } else if !(v > 0.0) {
                return Err(GmrfError::NonPositiveOffDiagonal { i, j, value: v });
            }
        }
    }
    Ok(())
}

/// One block `S_k` of unordered off-diagonal pairs sharing the radius `λ_k`.
///
/// The radius bounds the ℓ1 norm of the block's upper-triangle entries of
/// `W`; the matching primal penalty is `2 λ_k max |K_ij|`, one term for each
/// orientation of the block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub pairs: Vec<Edge>,
    pub radius: f64,
}

impl Block {
    pub fn new(pairs: Vec<Edge>, radius: f64) -> Self {
        Self { pairs, radius }
    }
}

/// Disjoint blocks covering every off-diagonal pair, plus diagonal penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPenalty {
    n: usize,
    blocks: Vec<Block>,
    diag_lambda: Array1<f64>,
}

impl BlockPenalty {
    /// Validates `blocks` and wraps every uncovered pair in a singleton block
    /// with `default_radius`. Fails with `UnassignedPair` when a pair is left
    /// uncovered and no default was given.
    pub fn new(
        n: usize,
        blocks: Vec<Block>,
        diag_lambda: Array1<f64>,
        default_radius: Option<f64>,
    ) -> Result<Self> {
        if diag_lambda.len() != n {
            return Err(GmrfError::DimensionMismatch { expected: n, found: diag_lambda.len() });
        }
        for (index, &value) in diag_lambda.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(GmrfError::NegativeDiagonalPenalty { index, value });
            }
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(blocks.len());
        for (k, block) in blocks.into_iter().enumerate() {
            if block.pairs.is_empty() {
                return Err(GmrfError::EmptyBlock { block: k });
            }
            if !(block.radius > 0.0) || !block.radius.is_finite() {
                return Err(GmrfError::NonPositiveBlockRadius { block: k, value: block.radius });
            }
            let mut pairs = Vec::with_capacity(block.pairs.len());
            for &(i, j) in &block.pairs {
                if i == j || i >= n || j >= n {
                    return Err(GmrfError::InvalidPair { block: k, i, j });
                }
                let e = edge(i, j);
                if !seen.insert(e) {
                    return Err(GmrfError::OverlappingBlocks { i: e.0, j: e.1 });
                }
                pairs.push(e);
            }
            normalized.push(Block { pairs, radius: block.radius });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if seen.contains(&(i, j)) {
                    continue;
                }
                match default_radius {
                    Some(r) if r > 0.0 && r.is_finite() => {
                        normalized.push(Block { pairs: vec![(i, j)], radius: r })
                    }
                    Some(r) => {
                        return Err(GmrfError::NonPositiveBlockRadius {
                            block: normalized.len(),
                            value: r,
                        })
                    }
                    None => return Err(GmrfError::UnassignedPair { i, j }),
                }
            }
        }
        Ok(Self { n, blocks: normalized, diag_lambda })
    }

    /// One singleton block per off-diagonal pair with radius `λ_ij`; the
    /// block feasible set then coincides with the elementwise box.
    pub fn singletons(penalty: &ElementwisePenalty) -> Self {
        let n = penalty.dim();
        let mut blocks = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                blocks.push(Block { pairs: vec![(i, j)], radius: penalty.get(i, j) });
            }
        }
        Self { n, blocks, diag_lambda: penalty.matrix().diag().to_owned() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn diag_lambda(&self) -> &Array1<f64> {
        &self.diag_lambda
    }

    /// Block index of every off-diagonal pair.
    pub fn block_index(&self) -> BTreeMap<Edge, usize> {
        let mut index = BTreeMap::new();
        for (k, b) in self.blocks.iter().enumerate() {
            for &e in &b.pairs {
                index.insert(e, k);
            }
        }
        index
    }
}

/// Either penalty form.
#[derive(Debug, Clone, Copy)]
pub enum PenaltyRef<'a> {
    Elementwise(&'a ElementwisePenalty),
    Block(&'a BlockPenalty),
}

impl<'a> From<&'a ElementwisePenalty> for PenaltyRef<'a> {
    fn from(p: &'a ElementwisePenalty) -> Self {
        PenaltyRef::Elementwise(p)
    }
}

impl<'a> From<&'a BlockPenalty> for PenaltyRef<'a> {
    fn from(p: &'a BlockPenalty) -> Self {
        PenaltyRef::Block(p)
    }
}

/// Rechecks every penalty invariant, reporting the first violation.
pub fn validate_penalty<'a>(penalty: impl Into<PenaltyRef<'a>>) -> Result<()> {
    match penalty.into() {
        PenaltyRef::Elementwise(p) => validate_elementwise(p.lambda.view()),
        PenaltyRef::Block(p) => {
            let rebuilt = BlockPenalty::new(p.n, p.blocks.clone(), p.diag_lambda.clone(), None)?;
            debug_assert_eq!(rebuilt.blocks.len(), p.blocks.len());
            Ok(())
        }
    }
}

/// Builds one block per unordered group pair `{q, r}` (including `q = r`),
/// with radius `scale · |S_qr|` counting unordered variable pairs.
///
/// Blocks that would be empty (a singleton group paired with itself) are
/// skipped.
pub fn blocks_from_groups(
    n: usize,
    groups: &[Vec<usize>],
    scale: f64,
    diag_lambda: Array1<f64>,
) -> Result<BlockPenalty> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(GmrfError::InvalidOption {
            name: "scale",
            reason: format!("must be > 0, got {scale}"),
        });
    }
    let mut owner = vec![None; n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(GmrfError::EmptyGroup { group: g });
        }
        for &v in members {
            if v >= n {
                return Err(GmrfError::NonPartition {
                    reason: format!("variable {v} out of range for dimension {n}"),
                });
            }
            if let Some(prev) = owner[v] {
                return Err(GmrfError::NonPartition {
                    reason: format!("variable {v} in groups {prev} and {g}"),
                });
            }
            owner[v] = Some(g);
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Err(GmrfError::NonPartition { reason: format!("variable {v} is in no group") });
    }

    let mut blocks = Vec::new();
    for q in 0..groups.len() {
        for r in q..groups.len() {
            let mut pairs = Vec::new();
            if q == r {
                let g = &groups[q];
                for (a, &i) in g.iter().enumerate() {
                    for &j in &g[a + 1..] {
                        pairs.push(edge(i, j));
                    }
                }
            } else {
                for &i in &groups[q] {
                    for &j in &groups[r] {
                        pairs.push(edge(i, j));
                    }
                }
            }
            if pairs.is_empty() {
                continue;
            }
            pairs.sort_unstable();
            let radius = scale * pairs.len() as f64;
            blocks.push(Block { pairs, radius });
        }
    }
    BlockPenalty::new(n, blocks, diag_lambda, None)
}

/// Dual iterate `W`; `Σ̂ + W` is positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    w: Array2<f64>,
}

impl DualPoint {
    /// Checks symmetry and that `Σ̂ + W` factors.
    pub fn new(cov: &EmpiricalCovariance, w: Array2<f64>) -> Result<Self> {
        let n = check_square(w.view())?;
        if n != cov.dim() {
            return Err(GmrfError::DimensionMismatch { expected: cov.dim(), found: n });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if w[[i, j]] != w[[j, i]] {
                    return Err(GmrfError::NotSymmetric { i, j });
                }
            }
        }
        linalg::cholesky((cov.matrix() + &w).view())?;
        Ok(Self { w })
    }

    pub(crate) fn new_unchecked(w: Array2<f64>) -> Self {
        Self { w }
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.w
    }
}

/// Precision matrix `K` together with the recovered edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionEstimate {
    pub k: Array2<f64>,
    pub edges: BTreeSet<Edge>,
}

impl PrecisionEstimate {
    /// Reads edges off the nonzero pattern of `k`.
    pub fn from_support(k: Array2<f64>, tol: f64) -> Self {
        let n = k.nrows();
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if k[[i, j]].abs() > tol {
                    edges.insert((i, j));
                }
            }
        }
        Self { k, edges }
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }
}

/// Knobs shared by both solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Stop once the duality gap drops below this.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Armijo sufficient-increase fraction.
    pub armijo_alpha: f64,
    /// Armijo backtracking factor.
    pub armijo_beta: f64,
    /// Line searches give up below this step.
    pub halving_min_t: f64,
    /// `|K_ij|` at or below this counts as zero.
    pub sparsity_tol: f64,
    /// Slack within which a dual constraint counts as active.
    pub complementarity_margin: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 0.1,
            max_iter: 10_000,
            armijo_alpha: 0.3,
            armijo_beta: 0.5,
            halving_min_t: 1e-12,
            sparsity_tol: 1e-6,
            complementarity_margin: 1e-8,
        }
    }
}

impl SolveOptions {
    pub fn with_gap_tol(mut self, gap_tol: f64) -> Self {
        self.gap_tol = gap_tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(GmrfError::InvalidOption { name, reason: reason.into() });
        if !(self.gap_tol > 0.0) {
            return bad("gap_tol", "must be > 0");
        }
        if !(self.armijo_alpha > 0.0 && self.armijo_alpha < 1.0) {
            return bad("armijo_alpha", "must lie in (0, 1)");
        }
        if !(self.armijo_beta > 0.0 && self.armijo_beta < 1.0) {
            return bad("armijo_beta", "must lie in (0, 1)");
        }
        if !(self.halving_min_t > 0.0) {
            return bad("halving_min_t", "must be > 0");
        }
        if !(self.sparsity_tol >= 0.0) {
            return bad("sparsity_tol", "must be >= 0");
        }
        if !(self.complementarity_margin >= 0.0) {
            return bad("complementarity_margin", "must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    GapReached,
    MaxIter,
    LineSearchStalled,
}

/// Per-iteration trace of a solve. Index 0 is the starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Accepted update steps.
    pub iterations: usize,
    pub gaps: Vec<f64>,
    /// `log det(Σ̂ + W)` at each iterate.
    pub objectives: Vec<f64>,
    /// Largest constraint excess at each iterate (≤ 0 when feasible).
    pub violations: Vec<f64>,
    /// Wall time of each update step, in seconds.
    pub step_seconds: Vec<f64>,
    pub termination: Termination,
    /// Sparsity truncation broke positive definiteness; `K` was returned untruncated.
    pub truncation_failed: bool,
}

impl SolveReport {
    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().unwrap_or(&f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    #[test]
    fn zero_off_diagonal_penalty_rejected() {
        let lambda = array![[0.0, 0.0], [0.0, 0.0]];
        assert!(matches!(
            ElementwisePenalty::new(lambda),
            Err(GmrfError::NonPositiveOffDiagonal { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn all_ones_penalty_ok() {
        let p = ElementwisePenalty::new(Array2::ones((3, 3))).unwrap();
        assert!(validate_penalty(&p).is_ok());
    }

    #[test]
    fn asymmetric_and_negative_diagonal_rejected() {
        let lambda = array![[0.0, 1.0], [0.5, 0.0]];
        assert_eq!(
            ElementwisePenalty::new(lambda).unwrap_err(),
            GmrfError::AsymmetricPenalty { i: 0, j: 1 }
        );
        let lambda = array![[-1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(
            ElementwisePenalty::new(lambda),
            Err(GmrfError::NegativeDiagonalPenalty { index: 0, .. })
        ));
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let blocks = vec![Block::new(vec![(0, 1)], 1.0), Block::new(vec![(0, 1), (0, 2)], 1.0)];
        assert_eq!(
            BlockPenalty::new(3, blocks, Array1::zeros(3), Some(1.0)).unwrap_err(),
            GmrfError::OverlappingBlocks { i: 0, j: 1 }
        );
    }

    #[test]
    fn mirrored_pair_counts_as_overlap() {
        let blocks = vec![Block::new(vec![(0, 1)], 1.0), Block::new(vec![(1, 0)], 1.0)];
        assert!(matches!(
            BlockPenalty::new(2, blocks, Array1::zeros(2), None),
            Err(GmrfError::OverlappingBlocks { .. })
        ));
    }

    #[test]
    fn unassigned_pairs_become_singletons() {
        let blocks = vec![Block::new(vec![(0, 1), (0, 2)], 0.5)];
        let p = BlockPenalty::new(3, blocks, Array1::zeros(3), Some(0.25)).unwrap();
        assert_eq!(p.blocks().len(), 2);
        assert_eq!(p.blocks()[1], Block::new(vec![(1, 2)], 0.25));
        let blocks = vec![Block::new(vec![(0, 1)], 0.5)];
        assert_eq!(
            BlockPenalty::new(3, blocks, Array1::zeros(3), None).unwrap_err(),
            GmrfError::UnassignedPair { i: 0, j: 2 }
        );
    }

    #[test]
    fn block_errors() {
        let z = Array1::zeros(3);
        assert!(matches!(
            BlockPenalty::new(3, vec![Block::new(vec![(0, 1)], 0.0)], z.clone(), Some(1.0)),
            Err(GmrfError::NonPositiveBlockRadius { block: 0, .. })
        ));
        assert!(matches!(
            BlockPenalty::new(3, vec![Block::new(vec![(1, 1)], 1.0)], z.clone(), Some(1.0)),
            Err(GmrfError::InvalidPair { .. })
        ));
        assert!(matches!(
            BlockPenalty::new(3, vec![Block::new(vec![], 1.0)], z, Some(1.0)),
            Err(GmrfError::EmptyBlock { block: 0 })
        ));
        assert!(matches!(
            BlockPenalty::new(3, vec![], array![0.0, -1.0, 0.0], Some(1.0)),
            Err(GmrfError::NegativeDiagonalPenalty { index: 1, .. })
        ));
    }

    #[test]
    fn groups_two_singletons() {
        let p = blocks_from_groups(2, &[vec![0], vec![1]], 1.0, Array1::zeros(2)).unwrap();
        assert_eq!(p.blocks(), &[Block::new(vec![(0, 1)], 1.0)]);
    }

    #[test]
    fn groups_pair_and_singleton() {
        let p = blocks_from_groups(3, &[vec![0, 1], vec![2]], 0.5, Array1::zeros(3)).unwrap();
        assert_eq!(
            p.blocks(),
            &[Block::new(vec![(0, 1)], 0.5), Block::new(vec![(0, 2), (1, 2)], 1.0)]
        );
    }

    #[test]
    fn single_group_of_three() {
        let p = blocks_from_groups(3, &[vec![0, 1, 2]], 1.0, Array1::zeros(3)).unwrap();
        assert_eq!(p.blocks().len(), 1);
        assert_eq!(p.blocks()[0].pairs.len(), 3);
        assert_eq!(p.blocks()[0].radius, 3.0);
    }

    #[test]
    fn group_errors() {
        let z = Array1::zeros(3);
        assert_eq!(
            blocks_from_groups(3, &[vec![0, 1, 2], vec![]], 1.0, z.clone()).unwrap_err(),
            GmrfError::EmptyGroup { group: 1 }
        );
        assert!(matches!(
            blocks_from_groups(3, &[vec![0, 1]], 1.0, z.clone()),
            Err(GmrfError::NonPartition { .. })
        ));
        assert!(matches!(
            blocks_from_groups(3, &[vec![0, 1], vec![1, 2]], 1.0, z),
            Err(GmrfError::NonPartition { .. })
        ));
    }

    #[test]
    fn covariance_validation() {
        assert!(matches!(
            EmpiricalCovariance::new(array![[1.0, 0.0], [0.0, 0.0]]),
            Err(GmrfError::DegenerateCovariance { index: 1, .. })
        ));
        assert!(matches!(
            EmpiricalCovariance::new(array![[1.0, 2.0], [2.0, 1.0]]),
            Err(GmrfError::NotPositiveSemidefinite { .. })
        ));
        // rank one is fine
        let c = EmpiricalCovariance::new(array![[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(c.max_abs_off_diagonal(), 1.0);
    }

    #[test]
    fn dual_point_requires_pd() {
        let cov = EmpiricalCovariance::new(array![[1.0, 0.5], [0.5, 1.0]]).unwrap();
        assert!(DualPoint::new(&cov, array![[0.0, 0.0], [0.0, 0.0]]).is_ok());
        assert_eq!(
            DualPoint::new(&cov, array![[0.0, 0.6], [0.6, 0.0]]).unwrap_err(),
            GmrfError::NotPositiveDefinite
        );
    }

    #[test]
    fn options_validation() {
        assert!(SolveOptions::default().validate().is_ok());
        let o = SolveOptions { armijo_alpha: 1.0, ..SolveOptions::default() };
        assert!(o.validate().is_err());
        assert!(SolveOptions::default().with_gap_tol(0.0).validate().is_err());
    }

    fn partition_strategy() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
        (2usize..12).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(0usize..4, n)).prop_map(|(n, labels)| {
                let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 4];
                for (v, &g) in labels.iter().enumerate() {
                    groups[g].push(v);
                }
                groups.retain(|g| !g.is_empty());
                (n, groups)
            })
        })
    }

    proptest! {
        #[test]
        fn covariance_is_exactly_symmetric(
            raw in proptest::collection::vec(-1.0f64..1.0, 9..=9),
        ) {
            let a = Array2::from_shape_vec((3, 3), raw).unwrap();
            let m = a.t().dot(&a) + Array2::<f64>::eye(3);
            let mut skewed = m.clone();
            skewed[[0, 1]] += 1e-13;
            let c = EmpiricalCovariance::new(skewed).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(c.matrix()[[i, j]].to_bits(), c.matrix()[[j, i]].to_bits());
                }
            }
        }

        #[test]
        fn group_blocks_are_valid((n, groups) in partition_strategy(), scale in 0.01f64..5.0) {
            let p = blocks_from_groups(n, &groups, scale, Array1::zeros(n)).unwrap();
            prop_assert!(validate_penalty(&p).is_ok());
            let total: usize = p.blocks().iter().map(|b| b.pairs.len()).sum();
            prop_assert_eq!(total, n * (n - 1) / 2);
            for b in p.blocks() {
                prop_assert!((b.radius - scale * b.pairs.len() as f64).abs() < 1e-12);
            }
        }
    }
}

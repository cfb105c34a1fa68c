//! Dual-feasible starting points, duality gaps, and sparsity read-out.
//!
//! With `W` dual feasible and `K = (Σ̂ + W)⁻¹`, the gap between the penalized
//! likelihood at `K` and the dual objective at `W` reduces to
//! `tr(Σ̂K) + penalty(K) − n`. Zero certifies optimality.

use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

use crate::error::{GmrfError, Result};
use crate::linalg::{self, trace_product};
use crate::model::{
    BlockPenalty, DualPoint, ElementwisePenalty, EmpiricalCovariance, PenaltyRef,
    PrecisionEstimate, SolveOptions,
};

/// Fraction of the admissible shrinkage actually used by [`feasible_init`].
const INTERIOR_FRACTION: f64 = 0.9;

/// Mixing weight `α` for the start `αΣ̂ + (1 − α) diag(Σ̂)`.
///
/// The off-diagonals of `W` are `−(1 − α) Σ̂_ij`, so interiority needs
/// `1 − α < λ_ij / |Σ̂_ij|` (box) or `1 − α < λ_k / Σ_{S_k} |Σ̂_ij|` (blocks).
/// We take 90% of the tightest such ratio, capped at 1.
pub fn interior_mixing_weight<'a>(
    cov: &EmpiricalCovariance,
    penalty: impl Into<PenaltyRef<'a>>,
) -> f64 {
    let s = cov.matrix();
    let n = cov.dim();
    let mut ratio = f64::INFINITY;
    match penalty.into() {
        PenaltyRef::Elementwise(p) => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = s[[i, j]].abs();
                    if a > 0.0 {
                        ratio = ratio.min(p.get(i, j) / a);
                    }
                }
            }
        }
        PenaltyRef::Block(p) => {
            for b in p.blocks() {
                let a: f64 = b.pairs.iter().map(|&(i, j)| s[[i, j]].abs()).sum();
                if a > 0.0 {
                    ratio = ratio.min(b.radius / a);
                }
            }
        }
    }
    let shrink = (INTERIOR_FRACTION * ratio).min(1.0);
    1.0 - shrink
}

/// Strictly feasible dual start with `W_ii = λ_ii` and
/// `W_ij = −(1 − α) Σ̂_ij` off the diagonal.
pub fn feasible_init<'a>(
    cov: &EmpiricalCovariance,
    penalty: impl Into<PenaltyRef<'a>>,
) -> Result<DualPoint> {
    let penalty = penalty.into();
    let n = cov.dim();
    let pdim = match penalty {
        PenaltyRef::Elementwise(p) => p.dim(),
        PenaltyRef::Block(p) => p.dim(),
    };
    if pdim != n {
        return Err(GmrfError::DimensionMismatch { expected: n, found: pdim });
    }
    let s = cov.matrix();
    for i in 0..n {
        if !(s[[i, i]] > 0.0) {
            return Err(GmrfError::DegenerateCovariance { index: i, value: s[[i, i]] });
        }
    }
    let shrink = 1.0 - interior_mixing_weight(cov, penalty);
    let mut w = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 0.0 } else { -shrink * s[[i, j]] });
    match penalty {
        PenaltyRef::Elementwise(p) => w.diag_mut().assign(&p.matrix().diag()),
        PenaltyRef::Block(p) => w.diag_mut().assign(p.diag_lambda()),
    }
    linalg::cholesky((s + &w).view()).map_err(|_| GmrfError::InfeasibleStart)?;
    Ok(DualPoint::new_unchecked(w))
}

/// `tr(Σ̂K) + Σ_{i,j} λ_ij |K_ij| − n`, summing over ordered pairs.
pub fn duality_gap_box(
    cov: &EmpiricalCovariance,
    k: ArrayView2<f64>,
    penalty: &ElementwisePenalty,
) -> f64 {
    let mut pen = 0.0;
    ndarray::Zip::from(k).and(penalty.matrix()).for_each(|&x, &l| pen += l * x.abs());
    trace_product(cov.view(), k) + pen - cov.dim() as f64
}

/// `tr(Σ̂K) + Σ_i λ_ii K_ii + Σ_k 2 λ_k max_{S_k} |K_ij| − n`.
///
/// The factor 2 counts each block once per orientation, matching the ordered
/// double sum of the elementwise gap; singleton blocks reproduce it exactly.
pub fn duality_gap_block(cov: &EmpiricalCovariance, k: ArrayView2<f64>, penalty: &BlockPenalty) -> f64 {
    let diag: f64 = k.diag().iter().zip(penalty.diag_lambda()).map(|(x, l)| l * x.abs()).sum();
    let blocks: f64 = penalty
        .blocks()
        .iter()
        .map(|b| {
            let m = b.pairs.iter().fold(0.0_f64, |m, &(i, j)| m.max(k[[i, j]].abs()));
            2.0 * b.radius * m
        })
        .sum();
    trace_product(cov.view(), k) + diag + blocks - cov.dim() as f64
}

/// Zeroing the inactive entries of `K` left a matrix that is not positive
/// definite. Carries the untruncated estimate.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("truncating inactive entries broke positive definiteness")]
pub struct TruncationBrokePd {
    pub untruncated: PrecisionEstimate,
}

fn truncate(
    k: &Array2<f64>,
    keep: impl Fn(usize, usize) -> bool,
) -> std::result::Result<PrecisionEstimate, TruncationBrokePd> {
    let n = k.nrows();
    let mut out = k.clone();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if keep(i, j) {
                edges.insert((i, j));
            } else {
                out[[i, j]] = 0.0;
                out[[j, i]] = 0.0;
            }
        }
    }
    if linalg::cholesky(out.view()).is_err() {
        return Err(TruncationBrokePd {
            untruncated: PrecisionEstimate { k: k.clone(), edges },
        });
    }
    Ok(PrecisionEstimate { k: out, edges })
}

/// Complementary slackness read-out: `{i, j}` is an edge iff its box
/// constraint is active (within `complementarity_margin`) and
/// `|K_ij| > sparsity_tol`. Every other off-diagonal entry is zeroed.
pub fn extract_structure(
    w: &DualPoint,
    k: &Array2<f64>,
    penalty: &ElementwisePenalty,
    opts: &SolveOptions,
) -> std::result::Result<PrecisionEstimate, TruncationBrokePd> {
    let wm = w.matrix();
    truncate(k, |i, j| {
        penalty.get(i, j) - wm[[i, j]].abs() <= opts.complementarity_margin
            && k[[i, j]].abs() > opts.sparsity_tol
    })
}

/// Block analogue of [`extract_structure`]: a pair survives only if its
/// block's ℓ1 constraint is active and `|K_ij| > sparsity_tol`.
pub fn extract_structure_block(
    w: &DualPoint,
    k: &Array2<f64>,
    penalty: &BlockPenalty,
    opts: &SolveOptions,
) -> std::result::Result<PrecisionEstimate, TruncationBrokePd> {
    let active = block_activity(w, penalty, opts.complementarity_margin);
    let index = penalty.block_index();
    truncate(k, |i, j| active[index[&(i, j)]] && k[[i, j]].abs() > opts.sparsity_tol)
}

/// Whether each block's constraint `Σ_{S_k} |W_ij| ≤ λ_k` is active.
pub fn block_activity(w: &DualPoint, penalty: &BlockPenalty, margin: f64) -> Vec<bool> {
    let wm = w.matrix();
    penalty
        .blocks()
        .iter()
        .map(|b| {
            let used: f64 = b.pairs.iter().map(|&(i, j)| wm[[i, j]].abs()).sum();
            b.radius - used <= margin
        })
        .collect()
}

/// Largest constraint excess of `w` (≤ 0 when feasible).
pub fn box_violation(w: &Array2<f64>, penalty: &ElementwisePenalty) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    ndarray::Zip::from(w).and(penalty.matrix()).for_each(|&x, &l| worst = worst.max(x.abs() - l));
    worst
}

pub fn block_violation(w: &Array2<f64>, penalty: &BlockPenalty) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for b in penalty.blocks() {
        let used: f64 = b.pairs.iter().map(|&(i, j)| w[[i, j]].abs()).sum();
        worst = worst.max(used - b.radius);
    }
    for (x, l) in w.diag().iter().zip(penalty.diag_lambda()) {
        worst = worst.max((x - l).abs());
    }
    worst
}

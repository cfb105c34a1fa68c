//! Scoring fitted models.

use std::collections::BTreeSet;

use ndarray::ArrayView1;
use serde::Serialize;

use crate::error::{GmrfError, Result};
use crate::linalg::{cholesky, trace_product};
use crate::model::{Edge, EmpiricalCovariance};
use crate::synth::GaussianModel;

/// `log det K − tr(Σ̂_test K)`.
///
/// The `−(n/2) log 2π` constant and the factor `1/2` are dropped, so scores
/// are only comparable across models evaluated on the same test data.
pub fn avg_loglik(test_cov: &EmpiricalCovariance, k: ndarray::ArrayView2<f64>) -> Result<f64> {
    if k.nrows() != test_cov.dim() {
        return Err(GmrfError::DimensionMismatch { expected: test_cov.dim(), found: k.nrows() });
    }
    let f = cholesky(k)?;
    Ok(f.log_det() - trace_product(test_cov.view(), k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureMetrics {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    /// 1 when nothing was recovered.
    pub precision: f64,
    /// 1 when the truth is empty.
    pub recall: f64,
}

pub fn structure_metrics(truth: &BTreeSet<Edge>, recovered: &BTreeSet<Edge>) -> StructureMetrics {
    let true_pos = truth.intersection(recovered).count();
    let false_pos = recovered.len() - true_pos;
    let false_neg = truth.len() - true_pos;
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    StructureMetrics {
        true_pos,
        false_pos,
        false_neg,
        precision: ratio(true_pos, recovered.len()),
        recall: ratio(true_pos, truth.len()),
    }
}

/// Class score `log det K − (v − μ)ᵀ K (v − μ)`.
pub fn class_score(v: ArrayView1<f64>, model: &GaussianModel) -> Result<f64> {
    if v.len() != model.dim() {
        return Err(GmrfError::DimensionMismatch { expected: model.dim(), found: v.len() });
    }
    let k = &model.precision.k;
    let d = &v - &model.mean;
    let f = cholesky(k.view())?;
    Ok(f.log_det() - d.dot(&k.dot(&d)))
}

/// Maximum-likelihood label; ties go to the earliest model.
pub fn classify<'a, L>(v: ArrayView1<f64>, models: &'a [(L, GaussianModel)]) -> Result<&'a L> {
    let mut best: Option<(&L, f64)> = None;
    for (label, model) in models {
        let s = class_score(v, model)?;
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((label, s));
        }
    }
    best.map(|(l, _)| l).ok_or(GmrfError::InvalidOption {
        name: "models",
        reason: "need at least one model".into(),
    })
}

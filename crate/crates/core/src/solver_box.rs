//! Projected gradient ascent on the box-constrained dual
//!
//! ```text
//! maximize log det(Σ̂ + W)  subject to  |W_ij| ≤ λ_ij
//! ```
//!
//! The gradient is `(Σ̂ + W)⁻¹`. Each iteration masks out components that
//! would push an active constraint outward, picks a step from the second
//! order model of `log det` along that direction, halves it until the
//! projected point improves the objective, then evaluates the duality gap at
//! the new iterate. The diagonal of `W` stays pinned at `λ_ii`.

use std::time::Instant;

use ndarray::Array2;

use crate::duality::{box_violation, duality_gap_box, extract_structure, feasible_init};
use crate::error::Result;
use crate::linalg::{cholesky, trace_product};
use crate::model::{
    DualPoint, ElementwisePenalty, EmpiricalCovariance, PrecisionEstimate, SolveOptions,
    SolveReport, Termination,
};
use crate::projections::project_box_in_place;

/// Relative tolerance for treating a box constraint as active.
const ACTIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineSearch {
    /// Accepted step, with the objective it reached.
    Step { t: f64, objective: f64 },
    /// No step size above the floor improved the objective.
    Stalled,
}

/// Masked ascent direction at `w`: computes the inverse and masks it.
pub fn masked_gradient(
    cov: &EmpiricalCovariance,
    w: &DualPoint,
    penalty: &ElementwisePenalty,
) -> Result<Array2<f64>> {
    let k = cholesky((cov.matrix() + w.matrix()).view())?.inverse();
    Ok(mask_gradient(k, w.matrix(), penalty))
}

/// Zeroes the diagonal of `grad` and every component pointing out of the box
/// at an active constraint.
pub fn mask_gradient(mut grad: Array2<f64>, w: &Array2<f64>, penalty: &ElementwisePenalty) -> Array2<f64> {
    let n = grad.nrows();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                grad[[i, j]] = 0.0;
                continue;
            }
            let l = penalty.get(i, j);
            let x = w[[i, j]];
            let g = grad[[i, j]];
            let active = (l - x.abs()).abs() <= ACTIVE_TOL * l.max(1.0);
            if active && ((x > 0.0 && g > 0.0) || (x < 0.0 && g < 0.0)) {
                grad[[i, j]] = 0.0;
            }
        }
    }
    grad
}

/// Step size along `grad` from the quadratic model
/// `t = tr(A G) / tr(A G A G)` with `A = (Σ̂ + W)⁻¹`, then halved until
/// `log det(Σ̂ + Π(W + tG)) > f0`.
///
/// A non-finite or non-positive initial step falls back to `t = 1`; a trial
/// point outside the positive-definite cone counts as no improvement.
pub fn quadratic_line_search(
    cov: &EmpiricalCovariance,
    w: &Array2<f64>,
    inverse: &Array2<f64>,
    grad: &Array2<f64>,
    penalty: &ElementwisePenalty,
    f0: f64,
    opts: &SolveOptions,
) -> LineSearch {
    if grad.iter().all(|&g| g == 0.0) {
        return LineSearch::Stalled;
    }
    let ag = inverse.dot(grad);
    let mut t = trace_product(inverse.view(), grad.view()) / trace_product(ag.view(), ag.view());
    if !t.is_finite() || t <= 0.0 {
        t = 1.0;
    }
    let mut trial = Array2::<f64>::zeros(w.raw_dim());
    while t >= opts.halving_min_t {
        if let Some(f) = trial_objective(cov, w, grad, t, penalty, &mut trial) {
            if f > f0 {
                return LineSearch::Step { t, objective: f };
            }
        }
        t *= 0.5;
    }
    LineSearch::Stalled
}

/// Writes `Π(W + tG)` into `trial` and returns `log det(Σ̂ + trial)`, or
/// `None` outside the positive-definite cone.
fn trial_objective(
    cov: &EmpiricalCovariance,
    w: &Array2<f64>,
    grad: &Array2<f64>,
    t: f64,
    penalty: &ElementwisePenalty,
    trial: &mut Array2<f64>,
) -> Option<f64> {
    ndarray::Zip::from(&mut *trial).and(w).and(grad).for_each(|x, &a, &g| *x = a + t * g);
    project_box_in_place(trial, penalty);
    cholesky((cov.matrix() + &*trial).view()).ok().map(|f| f.log_det())
}

/// Output of a solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub estimate: PrecisionEstimate,
    pub dual: DualPoint,
    pub report: SolveReport,
}

/// Maximizes the box-constrained dual from the interior start until the
/// duality gap drops below `opts.gap_tol`, the line search stalls, or
/// `opts.max_iter` updates have been made.
pub fn solve_box(
    cov: &EmpiricalCovariance,
    penalty: &ElementwisePenalty,
    opts: &SolveOptions,
) -> Result<Solution> {
    opts.validate()?;
    let mut w = feasible_init(cov, penalty)?.into_matrix();
    let factor = cholesky((cov.matrix() + &w).view())?;
    let mut objective = factor.log_det();
    let mut k = factor.inverse();

    let mut report = SolveReport {
        iterations: 0,
        gaps: vec![duality_gap_box(cov, k.view(), penalty)],
        objectives: vec![objective],
        violations: vec![box_violation(&w, penalty)],
        step_seconds: Vec::new(),
        termination: Termination::MaxIter,
        truncation_failed: false,
    };

    loop {
        if report.final_gap() < opts.gap_tol {
            report.termination = Termination::GapReached;
            break;
        }
        if report.iterations >= opts.max_iter {
            report.termination = Termination::MaxIter;
            break;
        }
        let started = Instant::now();
        let grad = mask_gradient(k.clone(), &w, penalty);
        let t = match quadratic_line_search(cov, &w, &k, &grad, penalty, objective, opts) {
            LineSearch::Step { t, .. } => t,
            LineSearch::Stalled => {
                report.termination = Termination::LineSearchStalled;
                break;
            }
        };
        w.zip_mut_with(&grad, |x, &g| *x += t * g);
        project_box_in_place(&mut w, penalty);
        let factor = cholesky((cov.matrix() + &w).view())?;
        objective = factor.log_det();
        k = factor.inverse();
        report.step_seconds.push(started.elapsed().as_secs_f64());

        report.iterations += 1;
        report.gaps.push(duality_gap_box(cov, k.view(), penalty));
        report.objectives.push(objective);
        report.violations.push(box_violation(&w, penalty));
        debug_assert!(report.violations.last().unwrap() <= &0.0);
    }

    let dual = DualPoint::new_unchecked(w);
    let estimate = match extract_structure(&dual, &k, penalty, opts) {
        Ok(est) => est,
        Err(e) => {
            report.truncation_failed = true;
            e.untruncated
        }
    };
    Ok(Solution { estimate, dual, report })
}

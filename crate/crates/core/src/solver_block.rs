//! Projected gradient ascent for the block-penalized dual
//!
//! ```text
//! maximize log det(Σ̂ + W)  subject to  Σ_{(i,j) ∈ S_k} |W_ij| ≤ λ_k  for every block
//! ```
//!
//! Projection onto the feasible set splits into independent ℓ1-ball
//! projections, one per block. Steps come from an Armijo backtracking search
//! along the projection arc; the accepted step is inflated by `1/β` before
//! the next iteration so the search does not keep shrinking.

use std::time::Instant;

use ndarray::Array2;

use crate::duality::{block_violation, duality_gap_block, extract_structure_block, feasible_init};
use crate::error::Result;
use crate::linalg::{cholesky, trace_product};
use crate::model::{BlockPenalty, DualPoint, EmpiricalCovariance, SolveOptions, SolveReport, Termination};
use crate::projections::project_blocks_in_place;
use crate::solver_box::Solution;

/// Upper bound on the persistent step size.
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmijoOutcome {
    /// `t` satisfied the sufficient-increase test. `moved` is false when the
    /// projected point equals the current one.
    Step { t: f64, objective: f64, moved: bool },
    Stalled,
}

/// Backtracks `t ∈ {t_init, β t_init, β² t_init, …}` until
/// `f(Π(W + tG)) ≥ f0 + α tr(D G)` with `D = Π(W + tG) − W`.
///
/// The accepted point is left in `trial`. A candidate outside the
/// positive-definite cone is rejected, as is a nonzero move whose objective
/// does not strictly exceed `f0` in floating point.
#[allow(clippy::too_many_arguments)]
pub fn armijo_step(
    cov: &EmpiricalCovariance,
    w: &Array2<f64>,
    grad: &Array2<f64>,
    penalty: &BlockPenalty,
    t_init: f64,
    f0: f64,
    opts: &SolveOptions,
    trial: &mut Array2<f64>,
) -> ArmijoOutcome {
    let mut t = t_init;
    while t >= opts.halving_min_t {
        ndarray::Zip::from(&mut *trial).and(w).and(grad).for_each(|x, &a, &g| *x = a + t * g);
        project_blocks_in_place(trial, penalty);
        let step = &*trial - w;
        let moved = step.iter().any(|&d| d != 0.0);
        let linear = trace_product(step.view(), grad.view());
        if let Ok(f) = cholesky((cov.matrix() + &*trial).view()) {
            let f = f.log_det();
            if f >= f0 + opts.armijo_alpha * linear && (!moved || f > f0) {
                return ArmijoOutcome::Step { t, objective: f, moved };
            }
        }
        t *= opts.armijo_beta;
    }
    ArmijoOutcome::Stalled
}

/// Maximizes the block dual from the interior start until the duality gap
/// drops below `opts.gap_tol`, no step makes progress, or `opts.max_iter`
/// updates have been made.
pub fn solve_block(cov: &EmpiricalCovariance, penalty: &BlockPenalty, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    let mut w = feasible_init(cov, penalty)?.into_matrix();
    let factor = cholesky((cov.matrix() + &w).view())?;
    let mut objective = factor.log_det();
    let mut k = factor.inverse();

    let mut report = SolveReport {
        iterations: 0,
        gaps: vec![duality_gap_block(cov, k.view(), penalty)],
        objectives: vec![objective],
        violations: vec![block_violation(&w, penalty)],
        step_seconds: Vec::new(),
        termination: Termination::MaxIter,
        truncation_failed: false,
    };

    let mut t = 1.0;
    let mut trial = Array2::<f64>::zeros(w.raw_dim());
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
        // the diagonal stays pinned at λ_ii
        let mut grad = k.clone();
        grad.diag_mut().fill(0.0);
        match armijo_step(cov, &w, &grad, penalty, t, objective, opts, &mut trial) {
            ArmijoOutcome::Step { t: accepted, moved: true, .. } => {
                std::mem::swap(&mut w, &mut trial);
                t = (accepted / opts.armijo_beta).min(MAX_STEP);
            }
            ArmijoOutcome::Step { moved: false, .. } | ArmijoOutcome::Stalled => {
                report.termination = Termination::LineSearchStalled;
                break;
            }
        }
        let factor = cholesky((cov.matrix() + &w).view())?;
        objective = factor.log_det();
        k = factor.inverse();
        report.step_seconds.push(started.elapsed().as_secs_f64());

        report.iterations += 1;
        report.gaps.push(duality_gap_block(cov, k.view(), penalty));
        report.objectives.push(objective);
        report.violations.push(block_violation(&w, penalty));
        debug_assert!(*report.violations.last().unwrap() <= 1e-10);
    }

    let dual = DualPoint::new_unchecked(w);
    let estimate = match extract_structure_block(&dual, &k, penalty, opts) {
        Ok(est) => est,
        Err(e) => {
            report.truncation_failed = true;
            e.untruncated
        }
    };
    Ok(Solution { estimate, dual, report })
}

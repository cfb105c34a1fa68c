//! Sparse Gaussian Markov random field estimation.
//!
//! The ℓ1-penalized Gaussian log-likelihood
//!
//! ```text
//! minimize  −log det K + tr(Σ̂K) + Σ_ij λ_ij |K_ij|    over K ≻ 0
//! ```
//!
//! is solved through its dual, `maximize log det(Σ̂ + W)` over a box
//! `|W_ij| ≤ λ_ij`, by projected gradient ascent ([`solver_box`]). Penalizing
//! whole blocks of entries by their largest magnitude turns the box into a
//! product of ℓ1 balls ([`solver_block`]). Both solvers start from a strictly
//! feasible dual point, keep every iterate feasible, and stop on a certified
//! duality gap; the sparsity pattern is read off from which dual constraints
//! are active.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duality;
pub mod error;
pub mod eval;
pub mod io;
pub mod linalg;
pub mod model;
pub mod projections;
pub mod solver_block;
pub mod solver_box;
pub mod synth;

pub use error::{GmrfError, Result};
pub use model::{
    blocks_from_groups, validate_penalty, Block, BlockPenalty, DualPoint, Edge, ElementwisePenalty,
    EmpiricalCovariance, PrecisionEstimate, SolveOptions, SolveReport, Termination,
};
pub use solver_block::solve_block;
pub use solver_box::{solve_box, Solution};

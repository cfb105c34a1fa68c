//! Euclidean projections onto the dual feasible sets.

use ndarray::{Array2, ArrayView2};

use crate::model::{BlockPenalty, ElementwisePenalty};

/// Clamps every entry into `[-λ_ij, λ_ij]`.
pub fn project_box(m: ArrayView2<f64>, penalty: &ElementwisePenalty) -> Array2<f64> {
    let mut out = m.to_owned();
    project_box_in_place(&mut out, penalty);
    out
}

pub fn project_box_in_place(m: &mut Array2<f64>, penalty: &ElementwisePenalty) {
    ndarray::Zip::from(m).and(penalty.matrix()).for_each(|x, &l| *x = x.clamp(-l, l));
}

/// Projection onto `{x : ‖x‖₁ ≤ r}`.
pub fn project_l1_ball(v: &[f64], r: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    l1_ball_in_place(&mut out, r);
    out
}

/// Projects in place and returns the soft threshold used (0 when `v` was
/// already inside the ball). Every output entry is exactly
/// `sign(v_i) · max(|v_i| − θ, 0)`.
pub fn l1_ball_in_place(v: &mut [f64], r: f64) -> f64 {
    let theta = l1_threshold(v, r);
    if theta > 0.0 {
        for x in v.iter_mut() {
            *x = soft_threshold(*x, theta);
        }
    }
    theta
}

#[inline]
pub(crate) fn soft_threshold(x: f64, theta: f64) -> f64 {
    let m = x.abs() - theta;
    if m > 0.0 {
        m.copysign(x)
    } else {
        0.0
    }
}

/// Threshold `θ ≥ 0` with `Σ max(|v_i| − θ, 0) = r`, or 0 if `‖v‖₁ ≤ r`.
///
/// Sort-based: with magnitudes sorted descending `u_1 ≥ u_2 ≥ …`, the support
/// size is the largest `ρ` with `u_ρ > (Σ_{i≤ρ} u_i − r) / ρ`.
fn l1_threshold(v: &[f64], r: f64) -> f64 {
    let r = r.max(0.0);
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm <= r {
        return 0.0;
    }
    if r == 0.0 {
        return f64::INFINITY;
    }
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - r) / (k + 1) as f64;
        if uk > t {
            theta = t;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

/// Projects each block's upper-triangle entries onto its ℓ1 ball and mirrors
/// the result; diagonal entries are left alone.
pub fn project_block_constraints(m: ArrayView2<f64>, penalty: &BlockPenalty) -> Array2<f64> {
    let mut out = m.to_owned();
    project_blocks_in_place(&mut out, penalty);
    out
}

pub fn project_blocks_in_place(m: &mut Array2<f64>, penalty: &BlockPenalty) {
    let mut buf = Vec::new();
    for block in penalty.blocks() {
        if let [(i, j)] = block.pairs[..] {
            let x = m[[i, j]].clamp(-block.radius, block.radius);
            m[[i, j]] = x;
            m[[j, i]] = x;
            continue;
        }
        buf.clear();
        buf.extend(block.pairs.iter().map(|&(i, j)| m[[i, j]]));
        l1_ball_in_place(&mut buf, block.radius);
        for (&(i, j), &x) in block.pairs.iter().zip(&buf) {
            m[[i, j]] = x;
            m[[j, i]] = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Block;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    #[test]
    fn box_clamps_both_sides() {
        let p = ElementwisePenalty::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let out = project_box(array![[0.0, 1.5], [1.5, 0.0]].view(), &p);
        assert_eq!(out[[0, 1]], 1.0);
        assert_eq!(out[[1, 0]], 1.0);
        let p = ElementwisePenalty::new(array![[0.0, 0.2], [0.2, 0.0]]).unwrap();
        let out = project_box(array![[0.0, -0.7], [-0.7, 0.0]].view(), &p);
        assert_eq!(out[[0, 1]], -0.2);
        let inside = array![[0.0, 0.1], [0.1, 0.0]];
        assert_eq!(project_box(inside.view(), &p), inside);
    }

    #[test]
    fn l1_examples() {
        assert_eq!(project_l1_ball(&[0.3, -0.1], 1.0), vec![0.3, -0.1]);
        assert_eq!(project_l1_ball(&[0.5, 0.5], 0.5), vec![0.25, 0.25]);
        assert_eq!(project_l1_ball(&[-2.0, 1.0], 1.0), vec![-1.0, 0.0]);
        assert_eq!(project_l1_ball(&[3.0, -1.0], 0.0), vec![0.0, 0.0]);
        assert!(project_l1_ball(&[], 1.0).is_empty());
    }

    #[test]
    fn tie_at_threshold_goes_to_zero() {
        // θ = 1 exactly, and |v_2| = 1 sits on it.
        let mut v = [3.0, 1.0];
        let theta = l1_ball_in_place(&mut v, 2.0);
        assert_eq!(theta, 1.0);
        assert_eq!(v, [2.0, 0.0]);
    }

    #[test]
    fn singleton_blocks_match_box() {
        let lambda = array![[0.0, 0.3, 0.1], [0.3, 0.0, 0.5], [0.1, 0.5, 0.0]];
        let ep = ElementwisePenalty::new(lambda).unwrap();
        let bp = BlockPenalty::singletons(&ep);
        let m = array![[0.0, 0.9, -0.05], [0.9, 0.0, -0.8], [-0.05, -0.8, 0.0]];
        assert_eq!(project_block_constraints(m.view(), &bp), project_box(m.view(), &ep));
    }

    #[test]
    fn block_projection_example() {
        let bp = BlockPenalty::new(
            3,
            vec![Block::new(vec![(0, 1), (0, 2)], 0.5)],
            Array1::zeros(3),
            Some(10.0),
        )
        .unwrap();
        let m = array![[1.0, 0.5, 0.5], [0.5, 1.0, 0.0], [0.5, 0.0, 1.0]];
        let out = project_block_constraints(m.view(), &bp);
        assert_eq!(out, array![[1.0, 0.25, 0.25], [0.25, 1.0, 0.0], [0.25, 0.0, 1.0]]);
        assert_eq!(project_block_constraints(out.view(), &bp), out);
    }

    fn sym(n: usize, raw: &[f64]) -> Array2<f64> {
        let a = Array2::from_shape_vec((n, n), raw.to_vec()).unwrap();
        (&a + &a.t()) * 0.5
    }

    fn block_penalty_4() -> BlockPenalty {
        BlockPenalty::new(
            4,
            vec![
                Block::new(vec![(0, 1), (2, 3)], 0.4),
                Block::new(vec![(0, 2), (0, 3), (1, 3)], 0.7),
            ],
            Array1::zeros(4),
            Some(0.2),
        )
        .unwrap()
    }

    fn frob(a: &Array2<f64>) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    proptest! {
        #[test]
        fn l1_output_is_feasible_and_thresholded(
            v in proptest::collection::vec(-5.0f64..5.0, 0..12),
            r in 0.0f64..4.0,
        ) {
            let mut out = v.clone();
            let theta = l1_ball_in_place(&mut out, r);
            prop_assert!(out.iter().map(|x| x.abs()).sum::<f64>() <= r + 1e-12);
            prop_assert!(theta >= 0.0);
            if theta > 0.0 {
                for (o, x) in out.iter().zip(&v) {
                    prop_assert_eq!(*o, soft_threshold(*x, theta));
                }
            } else {
                prop_assert_eq!(out, v);
            }
        }

        #[test]
        fn matrix_projections_idempotent_nonexpansive_symmetric(
            a in proptest::collection::vec(-1.0f64..1.0, 16),
            b in proptest::collection::vec(-1.0f64..1.0, 16),
        ) {
            let (x, y) = (sym(4, &a), sym(4, &b));
            let ep = ElementwisePenalty::new(array![
                [0.1, 0.2, 0.3, 0.1],
                [0.2, 0.0, 0.05, 0.4],
                [0.3, 0.05, 0.2, 0.1],
                [0.1, 0.4, 0.1, 0.0],
            ]).unwrap();
            let bp = block_penalty_4();
            for (px, py) in [
                (project_box(x.view(), &ep), project_box(y.view(), &ep)),
                (project_block_constraints(x.view(), &bp), project_block_constraints(y.view(), &bp)),
            ] {
                prop_assert!(frob(&(&px - &py)) <= frob(&(&x - &y)) + 1e-12);
                prop_assert_eq!(&px, &px.t());
            }
            let px = project_box(x.view(), &ep);
            prop_assert_eq!(project_box(px.view(), &ep), px);
            let px = project_block_constraints(x.view(), &bp);
            let again = project_block_constraints(px.view(), &bp);
            for (p, q) in px.iter().zip(again.iter()) {
                prop_assert!((p - q).abs() <= 1e-15);
            }
        }
    }
}

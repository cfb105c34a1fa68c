//! Dense symmetric linear algebra.
//!
//! Everything here works on `Array2<f64>` in standard (row-major) layout.
//! The Cholesky factorization deliberately does no pivoting or diagonal
//! regularization: a failed factorization is how the solvers detect that a
//! trial point has left the positive-definite cone.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{GmrfError, Result};

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: Array2<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Array2<f64> {
        &self.lower
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diag().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// `A⁻¹ = L⁻ᵀ L⁻¹`, symmetrized.
    pub fn inverse(&self) -> Array2<f64> {
        let linv = self.lower_inverse();
        let mut inv = linv.t().dot(&linv);
        symmetrize_in_place(&mut inv);
        inv
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(b.len(), n);
        for i in (0..n).rev() {
            let tail: f64 = b[i + 1..].iter().enumerate().map(|(k, x)| self.lower[[i + 1 + k, i]] * x).sum();
            b[i] = (b[i] - tail) / self.lower[[i, i]];
        }
    }

    fn lower_inverse(&self) -> Array2<f64> {
        let n = self.dim();
        // Row i of L⁻¹ only depends on rows < i; work column by column on a
        // transposed buffer so inner loops run over contiguous memory.
        let mut inv_t = Array2::<f64>::zeros((n, n));
        let l = &self.lower;
        for j in 0..n {
            inv_t[[j, j]] = 1.0 / l[[j, j]];
            for i in (j + 1)..n {
                let row = l.row(i);
                let row = row.as_slice().expect("standard layout");
                let col = inv_t.row(j);
                let col = col.as_slice().expect("standard layout");
                let s = dot(&row[j..i], &col[j..i]);
                inv_t[[j, i]] = -s / l[[i, i]];
            }
        }
        inv_t.reversed_axes().as_standard_layout().to_owned()
    }
}

/// Cholesky factorization of a symmetric matrix; only the lower triangle is read.
pub fn cholesky(a: ArrayView2<f64>) -> Result<CholeskyFactor> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(GmrfError::NotSquare { rows, cols });
    }
    let n = rows;
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let s = {
                let li = l.row(i);
                let lj = l.row(j);
                let li = li.as_slice().expect("standard layout");
                let lj = lj.as_slice().expect("standard layout");
                a[[i, j]] - dot(&li[..j], &lj[..j])
            };
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return Err(GmrfError::NotPositiveDefinite);
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Ok(CholeskyFactor { lower: l })
}

pub fn log_det(factor: &CholeskyFactor) -> f64 {
    factor.log_det()
}

pub fn spd_inverse(factor: &CholeskyFactor) -> Array2<f64> {
    factor.inverse()
}

/// `tr(A B) = Σ_ij A_ij B_ji`, without forming the product.
pub fn trace_product(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    assert_eq!(a.dim(), b.t().dim(), "trace_product: non-conformable");
    let mut s = 0.0;
    Zip::from(a).and(b.t()).for_each(|x, y| s += x * y);
    s
}

/// Replaces `a` with `(a + aᵀ) / 2`.
pub fn symmetrize_in_place(a: &mut Array2<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }
}

/// Largest absolute entry.
pub fn max_abs(a: ArrayView2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

// Four accumulators let the compiler keep several FMAs in flight.
#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (x, y) = (&x[..n], &y[..n]);
    let mut acc = [0.0_f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += x[k] * y[k];
        acc[1] += x[k + 1] * y[k + 1];
        acc[2] += x[k + 2] * y[k + 2];
        acc[3] += x[k + 3] * y[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in (4 * chunks)..n {
        s += x[k] * y[k];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn identity_factor_is_identity() {
        let eye = Array2::<f64>::eye(3);
        let f = cholesky(eye.view()).unwrap();
        assert_eq!(f.lower(), &eye);
        assert_eq!(log_det(&f), 0.0);
        assert_eq!(spd_inverse(&f), eye);
    }

    #[test]
    fn scalar_factor() {
        let f = cholesky(array![[4.0]].view()).unwrap();
        assert_eq!(f.lower()[[0, 0]], 2.0);
        assert_abs_diff_eq!(log_det(&f), 4.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert_eq!(cholesky(a.view()).unwrap_err(), GmrfError::NotPositiveDefinite);
    }

    #[test]
    fn non_square_is_rejected() {
        let a = Array2::<f64>::zeros((2, 3));
        assert!(matches!(cholesky(a.view()), Err(GmrfError::NotSquare { .. })));
    }

    #[test]
    fn two_by_two_log_det_and_inverse() {
        let a = array![[1.0, 0.3], [0.3, 1.0]];
        let f = cholesky(a.view()).unwrap();
        assert_abs_diff_eq!(log_det(&f), 0.91_f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_det(&f), -0.094311, epsilon = 1e-6);
        let inv = spd_inverse(&f);
        let expected = array![[1.0, -0.3], [-0.3, 1.0]] / 0.91;
        assert_abs_diff_eq!(inv, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(inv[[0, 0]], 1.098901, epsilon = 1e-6);
        assert_abs_diff_eq!(inv[[0, 1]], -0.329670, epsilon = 1e-6);
    }

    #[test]
    fn diagonal_inverse() {
        let f = cholesky(array![[2.0, 0.0], [0.0, 4.0]].view()).unwrap();
        assert_abs_diff_eq!(spd_inverse(&f), array![[0.5, 0.0], [0.0, 0.25]], epsilon = 1e-15);
    }

    #[test]
    fn trace_products() {
        let eye = Array2::<f64>::eye(5);
        assert_eq!(trace_product(eye.view(), eye.view()), 5.0);
        let a = array![[1.0, 0.0], [0.0, 2.0]];
        let b = array![[3.0, 0.0], [0.0, 4.0]];
        assert_eq!(trace_product(a.view(), b.view()), 11.0);
        let a = array![[0.0, 1.0], [1.0, 0.0]];
        let b = array![[0.0, 2.0], [2.0, 0.0]];
        assert_eq!(trace_product(a.view(), b.view()), 4.0);
    }

    #[test]
    fn trace_product_uses_transpose_for_asymmetric() {
        let a = array![[0.0, 1.0], [0.0, 0.0]];
        let b = array![[0.0, 0.0], [5.0, 0.0]];
        assert_eq!(trace_product(a.view(), b.view()), a.dot(&b).diag().sum());
    }

    #[test]
    fn upper_solve_matches_inverse() {
        let a = array![[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let f = cholesky(a.view()).unwrap();
        let mut x = [1.0, -2.0, 0.5];
        f.solve_upper_in_place(&mut x);
        let lt = f.lower().t().to_owned();
        let back = lt.dot(&ndarray::arr1(&x));
        assert_abs_diff_eq!(back, ndarray::arr1(&[1.0, -2.0, 0.5]), epsilon = 1e-14);
    }
}

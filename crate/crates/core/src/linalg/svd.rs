//! Singular values by one-sided (Hestenes) Jacobi rotations.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::CMatrix;
use crate::C64;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Work on columns of the taller orientation.
    let m = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let rows = m.rows();
    let ncols = m.cols();
    let mut cols: Vec<Vec<C64>> = (0..ncols).map(|j| m.column(j)).collect();
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in (p + 1)..ncols {
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                let alpha: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = cp[i];
                    let y = cq[i] * phase.conj();
                    cp[i] = x * c - y * s;
                    cq[i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| super::norm2(c)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(a: &CMatrix, rel_tol: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn diagonal_singular_values() {
        let a = CMatrix::diag(&[c64(3.0, 4.0), c64(0.0, -2.0), c64(1.0, 0.0)]);
        let sv = singular_values(&a);
        assert!((sv[0] - 5.0).abs() < 1e-14);
        assert!((sv[1] - 2.0).abs() < 1e-14);
        assert!((sv[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_of_outer_product_sum() {
        // rank-2 complex 6x5 matrix
        let u1: Vec<C64> = (0..6).map(|i| c64(i as f64, 1.0)).collect();
        let v1: Vec<C64> = (0..5).map(|j| c64(1.0, j as f64)).collect();
        let u2: Vec<C64> = (0..6).map(|i| c64((i * i) as f64, -2.0)).collect();
        let v2: Vec<C64> = (0..5).map(|j| c64(j as f64 - 2.0, 0.5)).collect();
        let a = CMatrix::from_fn(6, 5, |i, j| u1[i] * v1[j] + u2[i] * v2[j]);
        assert_eq!(numerical_rank(&a, 1e-10), 2);
        assert_eq!(numerical_rank(&a.transpose(), 1e-10), 2);
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        assert_eq!(numerical_rank(&CMatrix::zeros(0, 4), 1e-10), 0);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 3), 1e-10), 0);
    }
}

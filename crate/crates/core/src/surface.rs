//! Polynomial spaces on the reference triangle and the surface operators
//! `∇`, `∇⊥ = (−∂y, ∂x)`, `∇⊥·` and `∇·` between them.
//!
//! Scalar spaces use monomials `x^{d−j} yʲ` in graded order
//! (`d = 0, 1, …`, then `j = 0..=d`). Vector spaces `(P^{p−1})²` are
//! component-major: all `x`-component monomials, then all `y`-component ones.

use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::{c64, Error, Result};

/// Largest supported polynomial degree; monomial conditioning degrades past it.
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// `P^p`
    ScalarH1,
    /// `(P^{p−1})²`
    VectorHcurl,
    /// `P^{p−2}`
    ScalarL2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceOp {
    /// `P^p → (P^{p−1})²`
    Grad,
    /// `P^p → (P^{p−1})²`
    PerpGrad,
    /// `(P^{p−1})² → P^{p−2}`, `(a, b) ↦ ∂x b − ∂y a`
    ScalarCurl,
    /// `(P^{p−1})² → P^{p−2}`
    Div,
}

/// `dim P^d`, zero for negative `d`.
pub fn scalar_dim(d: isize) -> usize {
    if d < 0 {
        0
    } else {
        let d = d as usize;
        (d + 1) * (d + 2) / 2
    }
}

pub fn space_dim(p: usize, kind: SpaceKind) -> usize {
    let p = p as isize;
    match kind {
        SpaceKind::ScalarH1 => scalar_dim(p),
        SpaceKind::VectorHcurl => 2 * scalar_dim(p - 1),
        SpaceKind::ScalarL2 => scalar_dim(p - 2),
    }
}

/// Exponents `(i, j)` of `xⁱ yʲ` in graded order up to total degree `d`.
pub fn monomial_exponents(d: isize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(scalar_dim(d));
    if d < 0 {
        return out;
    }
    for deg in 0..=(d as usize) {
        for j in 0..=deg {
            out.push((deg - j, j));
        }
    }
    out
}

/// Position of `xⁱ yʲ` in the graded order.
#[inline]
pub fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrianglePolySpace {
    pub degree: usize,
    pub kind: SpaceKind,
}

impl TrianglePolySpace {
    pub fn new(degree: usize, kind: SpaceKind) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Invalid("surface polynomial degree above 8"));
        }
        Ok(Self { degree, kind })
    }

    pub fn dim(&self) -> usize {
        space_dim(self.degree, self.kind)
    }

    /// Degree of the scalar (component) monomials; negative for empty spaces.
    pub fn component_degree(&self) -> isize {
        let p = self.degree as isize;
        match self.kind {
            SpaceKind::ScalarH1 => p,
            SpaceKind::VectorHcurl => p - 1,
            SpaceKind::ScalarL2 => p - 2,
        }
    }

    pub fn components(&self) -> usize {
        match self.kind {
            SpaceKind::VectorHcurl => 2,
            _ => 1,
        }
    }

    /// `(component, i, j)` for every basis function, in basis order.
    pub fn basis(&self) -> Vec<(usize, usize, usize)> {
        let mono = monomial_exponents(self.component_degree());
        let mut out = Vec::with_capacity(self.dim());
        for c in 0..self.components() {
            out.extend(mono.iter().map(|&(i, j)| (c, i, j)));
        }
        out
    }
}

/// Value and gradient of `xⁱ yʲ`.
#[inline]
pub fn monomial_with_gradient(i: usize, j: usize, x: f64, y: f64) -> (f64, [f64; 2]) {
    let v = powi(x, i) * powi(y, j);
    let dx = if i == 0 { 0.0 } else { i as f64 * powi(x, i - 1) * powi(y, j) };
    let dy = if j == 0 { 0.0 } else { j as f64 * powi(x, i) * powi(y, j - 1) };
    (v, [dx, dy])
}

#[inline]
fn powi(x: f64, n: usize) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r *= x;
    }
    r
}

/// Matrix of a surface operator between the monomial bases.
pub fn surf_operator(op: SurfaceOp, p: usize) -> Result<CMatrix> {
    if p > MAX_DEGREE {
        return Err(Error::Invalid("surface polynomial degree above 8"));
    }
    let p = p as isize;
    let m = match op {
        SurfaceOp::Grad | SurfaceOp::PerpGrad => {
            let src = monomial_exponents(p);
            let tgt_dim = scalar_dim(p - 1);
            let mut m = CMatrix::zeros(2 * tgt_dim, src.len());
            for (col, &(i, j)) in src.iter().enumerate() {
                // ∂x, ∂y as (row, value)
                let dx = (i > 0).then(|| (monomial_index(i - 1, j), i as f64));
                let dy = (j > 0).then(|| (monomial_index(i, j - 1), j as f64));
                let (first, second, sign_first) = match op {
                    SurfaceOp::Grad => (dx, dy, 1.0),
                    _ => (dy, dx, -1.0),
                };
                if let Some((r, v)) = first {
                    m[(r, col)] = c64(sign_first * v, 0.0);
                }
                if let Some((r, v)) = second {
                    m[(tgt_dim + r, col)] = c64(v, 0.0);
                }
            }
            m
        }
        SurfaceOp::ScalarCurl | SurfaceOp::Div => {
            let comp = monomial_exponents(p - 1);
            let n = comp.len();
            let mut m = CMatrix::zeros(scalar_dim(p - 2), 2 * n);
            for (l, &(i, j)) in comp.iter().enumerate() {
                // column l is (xⁱyʲ, 0), column n + l is (0, xⁱyʲ)
                let (a_op, b_op, a_sign) = match op {
                    SurfaceOp::Div => ((1, 0), (0, 1), 1.0),
                    _ => ((0, 1), (1, 0), -1.0),
                };
                let deriv = |d: (usize, usize)| -> Option<(usize, f64)> {
                    if d == (1, 0) {
                        (i > 0).then(|| (monomial_index(i - 1, j), i as f64))
                    } else {
                        (j > 0).then(|| (monomial_index(i, j - 1), j as f64))
                    }
                };
                if let Some((r, v)) = deriv(a_op) {
                    m[(r, l)] = c64(a_sign * v, 0.0);
                }
                if let Some((r, v)) = deriv(b_op) {
                    m[(r, n + l)] = c64(v, 0.0);
                }
            }
            m
        }
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;

    #[test]
    fn dimension_examples() {
        assert_eq!(space_dim(3, SpaceKind::ScalarH1), 10);
        assert_eq!(space_dim(3, SpaceKind::VectorHcurl), 12);
        assert_eq!(space_dim(1, SpaceKind::ScalarL2), 0);
        assert_eq!(space_dim(0, SpaceKind::VectorHcurl), 0);
        for p in 0..=MAX_DEGREE {
            assert_eq!(space_dim(p, SpaceKind::ScalarH1), (p + 1) * (p + 2) / 2);
            assert_eq!(space_dim(p, SpaceKind::VectorHcurl), (p + 1) * p);
            assert_eq!(space_dim(p, SpaceKind::ScalarL2), p * p.saturating_sub(1) / 2);
            for kind in [SpaceKind::ScalarH1, SpaceKind::VectorHcurl, SpaceKind::ScalarL2] {
                let s = TrianglePolySpace::new(p, kind).unwrap();
                assert_eq!(s.basis().len(), s.dim());
            }
        }
        assert!(TrianglePolySpace::new(9, SpaceKind::ScalarH1).is_err());
    }

    #[test]
    fn monomial_order_is_graded() {
        let e = monomial_exponents(2);
        assert_eq!(e, [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (k, &(i, j)) in monomial_exponents(6).iter().enumerate() {
            assert_eq!(monomial_index(i, j), k);
        }
    }

    #[test]
    fn gradient_examples() {
        let g = surf_operator(SurfaceOp::Grad, 2).unwrap();
        assert_eq!((g.rows(), g.cols()), (6, 6));
        assert!(g.column(0).iter().all(|z| z.norm() == 0.0));
        // grad x = (1, 0)
        let col = g.column(1);
        assert_eq!(col[0], c64(1.0, 0.0));
        assert!(col[1..].iter().all(|z| z.norm() == 0.0));
        let pg = surf_operator(SurfaceOp::PerpGrad, 2).unwrap();
        // ∇⊥ x = (0, 1), ∇⊥ y = (−1, 0)
        assert_eq!(pg[(3, 1)], c64(1.0, 0.0));
        assert_eq!(pg[(0, 2)], c64(-1.0, 0.0));
    }

    #[test]
    fn empty_spaces_give_empty_matrices() {
        let g = surf_operator(SurfaceOp::Grad, 0).unwrap();
        assert_eq!((g.rows(), g.cols()), (0, 1));
        let c = surf_operator(SurfaceOp::ScalarCurl, 1).unwrap();
        assert_eq!((c.rows(), c.cols()), (0, 2));
    }

    #[test]
    fn operators_match_pointwise_derivatives() {
        let (x, y) = (0.3, 0.45);
        for p in 1..=6 {
            let g = surf_operator(SurfaceOp::Grad, p).unwrap();
            let src = monomial_exponents(p as isize);
            let tgt = monomial_exponents(p as isize - 1);
            for (col, &(i, j)) in src.iter().enumerate() {
                let (_, grad) = monomial_with_gradient(i, j, x, y);
                let mut gx = 0.0;
                let mut gy = 0.0;
                for (r, &(a, b)) in tgt.iter().enumerate() {
                    let v = monomial_with_gradient(a, b, x, y).0;
                    gx += g[(r, col)].re * v;
                    gy += g[(tgt.len() + r, col)].re * v;
                }
                assert!((gx - grad[0]).abs() < 1e-14 && (gy - grad[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn surface_sequences_are_exact() {
        for p in 1..=6 {
            let g = surf_operator(SurfaceOp::Grad, p).unwrap();
            let pg = surf_operator(SurfaceOp::PerpGrad, p).unwrap();
            let sc = surf_operator(SurfaceOp::ScalarCurl, p).unwrap();
            let dv = surf_operator(SurfaceOp::Div, p).unwrap();
            let dim_w = space_dim(p, SpaceKind::ScalarH1);
            let dim_v = space_dim(p, SpaceKind::VectorHcurl);
            let dim_x = space_dim(p, SpaceKind::ScalarL2);
            assert_eq!(numerical_rank(&g, 1e-10), dim_w - 1);
            assert_eq!(numerical_rank(&pg, 1e-10), dim_w - 1);
            if dim_x > 0 {
                assert!(sc.matmul(&g).max_abs() == 0.0);
                assert!(dv.matmul(&pg).max_abs() == 0.0);
                assert_eq!(numerical_rank(&sc, 1e-10), dim_x);
                assert_eq!(numerical_rank(&dv, 1e-10), dim_x);
            }
            // rank(grad) = nullity(scalar curl)
            let curl_rank = if dim_x > 0 { numerical_rank(&sc, 1e-10) } else { 0 };
            assert_eq!(dim_w - 1, dim_v - curl_rank);
        }
    }

    #[test]
    fn perp_grad_is_rotated_grad() {
        let g = surf_operator(SurfaceOp::Grad, 4).unwrap();
        let pg = surf_operator(SurfaceOp::PerpGrad, 4).unwrap();
        let h = g.rows() / 2;
        for c in 0..g.cols() {
            for r in 0..h {
                assert_eq!(pg[(r, c)], -g[(h + r, c)]);
                assert_eq!(pg[(h + r, c)], g[(r, c)]);
            }
        }
    }
}

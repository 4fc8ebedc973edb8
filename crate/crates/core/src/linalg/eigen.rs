//! Shift-invert Krylov–Schur for the generalized problem `S x = λ M x`.
//!
//! Arnoldi runs on `(S - σ M)⁻¹ M`, whose dominant eigenvalues `θ` belong to
//! the `λ = σ + 1/θ` closest to the shift. Restarts keep the wanted part of a
//! reordered Schur form of the projected matrix. Ritz pairs whose residual is
//! still above the tolerance after the restart budget are polished by a few
//! steps of inverse iteration with the unconjugated Rayleigh quotient, which
//! is the natural one for complex-symmetric pencils.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{dotc, dotu, norm2, schur, CMatrix, LuFactor};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct EigOptions {
    /// Krylov subspace dimension; `None` picks `max(2k + 20, 40)` capped at `n`.
    pub krylov_dim: Option<usize>,
    pub max_restarts: usize,
    /// Maximum inverse-iteration polishing steps per pair.
    pub polish_steps: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { krylov_dim: None, max_restarts: 10, polish_steps: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    /// Eigenvalue `κ²` of `S x = κ² M x`.
    pub kappa_sq: C64,
    /// Principal square root, see [`principal_kappa`].
    pub kappa: C64,
    /// `‖S x − κ² M x‖ / (‖S‖ + |κ²| ‖M‖)` with `‖x‖₂ = 1` and Frobenius matrix norms.
    pub residual: f64,
    pub converged: bool,
    /// Multiplicity tag; `1` unless the caller knows better.
    pub multiplicity: usize,
    pub vector: Vec<C64>,
}

#[derive(Clone, Debug, Default)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    pub shift: C64,
    pub tol: f64,
    pub restarts: usize,
}

impl Spectrum {
    pub fn all_converged(&self) -> bool {
        self.pairs.iter().all(|p| p.converged)
    }

    pub fn kappas(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.kappa).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `κ = √(κ²)` on the branch `Re κ ≥ 0`; when `Re κ = 0` the root with
/// `Im κ ≤ 0` is taken.
pub fn principal_kappa(kappa_sq: C64) -> C64 {
    let k = kappa_sq.sqrt();
    let k = if k.re < 0.0 { -k } else { k };
    if k.re.abs() <= 1e-15 * k.norm() && k.im > 0.0 {
        C64::new(0.0, -k.im)
    } else {
        k
    }
}

pub(crate) fn pencil_residual(s: &CMatrix, m: &CMatrix, lambda: C64, x: &[C64], norms: (f64, f64)) -> f64 {
    let sx = s.matvec(x);
    let mx = m.matvec(x);
    let r: f64 = sx.iter().zip(&mx).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    let xn = norm2(x).max(f64::MIN_POSITIVE);
    r / ((norms.0 + lambda.norm() * norms.1).max(f64::MIN_POSITIVE) * xn)
}

/// `count` eigenpairs of `S x = κ² M x` with `κ²` nearest to `shift`.
pub fn shift_invert_eig(s: &CMatrix, m: &CMatrix, shift: C64, count: usize, tol: f64) -> Result<Spectrum> {
    shift_invert_eig_with(s, m, shift, count, tol, &EigOptions::default())
}

pub fn shift_invert_eig_with(s: &CMatrix, m: &CMatrix, shift: C64, count: usize, tol: f64, opts: &EigOptions) -> Result<Spectrum> {
    if !s.is_square() || !m.is_square() || s.rows() != m.rows() {
        return Err(Error::Shape("S and M must be square and of equal size"));
    }
    let n = s.rows();
    if n == 0 || count == 0 {
        return Ok(Spectrum { pairs: Vec::new(), shift, tol, restarts: 0 });
    }
    let count = count.min(n);
    let shifted = s.add_scaled(m, -shift);
    let lu = LuFactor::new(&shifted).map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::ShiftOnEigenvalue { re: shift.re, im: shift.im, pivot },
        other => other,
    })?;
    let op = |x: &[C64]| lu.solve(&m.matvec(x));

    let kdim = opts.krylov_dim.unwrap_or_else(|| (2 * count + 20).max(40)).clamp(count.min(n), n);
    let kdim = kdim.max(count);

    // Deterministic start vector.
    let mut v0: Vec<C64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_895;
            C64::new(1.0 + 0.5 * (t - t.floor()), 0.25 * (2.7 * t).sin())
        })
        .collect();
    let nv = norm2(&v0);
    v0.iter_mut().for_each(|z| *z /= nv);

    let mut basis: Vec<Vec<C64>> = vec![v0];
    // Projected matrix, (kdim + 1) x kdim; row `kept` carries the residual row.
    let mut h = CMatrix::zeros(kdim + 1, kdim);
    let mut kept = 0usize;
    let mut restarts = 0usize;

    let (theta, ritz_coords, active) = loop {
        // Extend the Krylov–Schur factorisation from `kept` to `kdim` columns.
        let mut active = kdim;
        for j in kept..kdim {
            let mut w = op(&basis[j]);
            let mut coef = vec![C64::new(0.0, 0.0); j + 1];
            for _pass in 0..2 {
                for (i, vi) in basis.iter().enumerate().take(j + 1) {
                    let c = dotc(vi, &w);
                    coef[i] += c;
                    for (wk, vk) in w.iter_mut().zip(vi) {
                        *wk -= c * vk;
                    }
                }
            }
            for (i, c) in coef.into_iter().enumerate() {
                h[(i, j)] += c;
            }
            let beta = norm2(&w);
            let colnorm: f64 = (0..=j).map(|i| h[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if beta <= 1e-13 * colnorm.max(f64::MIN_POSITIVE) || j + 1 == n {
                // Invariant subspace: the projection is exact.
                active = j + 1;
                for jj in 0..=j {
                    h[(j + 1, jj)] = C64::new(0.0, 0.0);
                }
                if basis.len() <= j + 1 {
                    basis.push(vec![C64::new(0.0, 0.0); n]);
                }
                break;
            }
            h[(j + 1, j)] = C64::new(beta, 0.0);
            w.iter_mut().for_each(|z| *z /= beta);
            if basis.len() > j + 1 {
                basis[j + 1] = w;
            } else {
                basis.push(w);
            }
        }

        let proj = h.block(0, 0, active, active);
        let resid_row: Vec<C64> = (0..active).map(|j| h[(active, j)]).collect();
        let mut sch = schur(&proj)?;
        // Wanted Ritz values (largest |θ|) to the front.
        for pos in 0..active {
            let best = (pos..active)
                .max_by(|&a, &b| sch.t[(a, a)].norm().partial_cmp(&sch.t[(b, b)].norm()).unwrap_or(core::cmp::Ordering::Equal))
                .unwrap();
            sch.move_up(best, pos);
        }
        let y = sch.triangular_eigenvectors();
        let zy = sch.z.matmul(&y);
        let want = count.min(active);
        let mut nconv = 0;
        for i in 0..want {
            let col = zy.column(i);
            let res = dotu(&resid_row, &col).norm() / norm2(&col).max(f64::MIN_POSITIVE);
            let th = sch.t[(i, i)].norm();
            if res <= tol * 1e-2 * th {
                nconv += 1;
            }
        }
        let exact = active < kdim || active == n;
        if nconv == want || exact || restarts >= opts.max_restarts {
            let theta: Vec<C64> = (0..want).map(|i| sch.t[(i, i)]).collect();
            break (theta, zy.block(0, 0, active, want), active);
        }

        // Restart: keep the leading Schur vectors.
        restarts += 1;
        let keep = (want + (active - want) / 2).clamp(want, active - 1);
        let mut new_basis: Vec<Vec<C64>> = Vec::with_capacity(kdim + 1);
        for c in 0..keep {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (r, br) in basis.iter().enumerate().take(active) {
                let zc = sch.z[(r, c)];
                if zc.re == 0.0 && zc.im == 0.0 {
                    continue;
                }
                for (vk, bk) in v.iter_mut().zip(br) {
                    *vk += zc * bk;
                }
            }
            new_basis.push(v);
        }
        new_basis.push(basis[active].clone());
        let mut new_h = CMatrix::zeros(kdim + 1, kdim);
        for i in 0..keep {
            for j in 0..keep {
                new_h[(i, j)] = sch.t[(i, j)];
            }
        }
        for j in 0..keep {
            let b: C64 = (0..active).map(|r| resid_row[r] * sch.z[(r, j)]).sum();
            new_h[(keep, j)] = b;
        }
        basis = new_basis;
        h = new_h;
        kept = keep;
    };

    let norms = (s.norm_fro(), m.norm_fro());
    let mut pairs = Vec::with_capacity(theta.len());
    for (i, th) in theta.iter().enumerate() {
        let mut x = vec![C64::new(0.0, 0.0); n];
        for r in 0..active {
            let c = ritz_coords[(r, i)];
            for (xk, bk) in x.iter_mut().zip(&basis[r]) {
                *xk += c * bk;
            }
        }
        normalize(&mut x);
        let mut lambda = if th.norm() > 0.0 { shift + th.inv() } else { shift };
        let mut res = pencil_residual(s, m, lambda, &x, norms);
        let mut steps = 0;
        while res > tol && steps < opts.polish_steps {
            steps += 1;
            let Some((l2, x2)) = polish(s, m, lambda, &x) else { break };
            let r2 = pencil_residual(s, m, l2, &x2, norms);
            if r2 >= res {
                break;
            }
            lambda = l2;
            x = x2;
            res = r2;
        }
        pairs.push(EigenPair {
            kappa_sq: lambda,
            kappa: principal_kappa(lambda),
            residual: res,
            converged: res <= tol,
            multiplicity: 1,
            vector: x,
        });
    }
    pairs.sort_by(|a, b| (a.kappa_sq - shift).norm().partial_cmp(&(b.kappa_sq - shift).norm()).unwrap_or(core::cmp::Ordering::Equal));
    Ok(Spectrum { pairs, shift, tol, restarts })
}

fn normalize(x: &mut [C64]) {
    let nrm = norm2(x);
    if nrm > 0.0 {
        x.iter_mut().for_each(|z| *z /= nrm);
    }
}

/// One inverse-iteration step at `lambda` followed by the unconjugated
/// Rayleigh quotient.
fn polish(s: &CMatrix, m: &CMatrix, lambda: C64, x: &[C64]) -> Option<(C64, Vec<C64>)> {
    let scale = lambda.norm().max(1.0);
    let nudged = lambda + C64::new(1e-13 * scale, 1e-13 * scale);
    let lu = LuFactor::new(&s.add_scaled(m, -nudged)).ok()?;
    let mut y = lu.solve(&m.matvec(x));
    normalize(&mut y);
    let num = dotu(&y, &s.matvec(&y));
    let den = dotu(&y, &m.matvec(&y));
    let lam = if den.norm() > 1e-300 { num / den } else { lambda };
    Some((lam, y))
}

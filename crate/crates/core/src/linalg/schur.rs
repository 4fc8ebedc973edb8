//! Complex Schur decomposition `A = Z T Zᴴ` by Householder reduction to
//! Hessenberg form followed by single-shift QR with Wilkinson shifts.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::CMatrix;
use crate::{Error, Result, C64};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug)]
pub struct Schur {
    /// Upper triangular factor.
    pub t: CMatrix,
    /// Unitary factor.
    pub z: CMatrix,
}

/// Complex rotation with real cosine: `G [x; y] = [r; 0]`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Self { c: 1.0, s: C64::new(0.0, 0.0) };
        }
        if ax == 0.0 {
            return Self { c: 0.0, s: y.conj() / ay };
        }
        let nrm = ax.hypot(ay);
        let sign = x / ax;
        Self { c: ax / nrm, s: sign * y.conj() / nrm }
    }

    /// Rows `(p, q)` of `m`, columns `from..`.
    fn rotate_rows(&self, m: &mut CMatrix, p: usize, q: usize, from: usize) {
        for j in from..m.cols() {
            let a = m[(p, j)];
            let b = m[(q, j)];
            m[(p, j)] = a * self.c + self.s * b;
            m[(q, j)] = b * self.c - self.s.conj() * a;
        }
    }

    /// Right-multiplies columns `(p, q)` of `m` by `Gᴴ`, rows `0..to`.
    fn rotate_cols(&self, m: &mut CMatrix, p: usize, q: usize, to: usize) {
        for i in 0..to {
            let a = m[(i, p)];
            let b = m[(i, q)];
            m[(i, p)] = a * self.c + b * self.s.conj();
            m[(i, q)] = b * self.c - a * self.s;
        }
    }
}

/// Householder reduction to upper Hessenberg form, returning `(H, Q)` with
/// `A = Q H Qᴴ`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..(n - 2) {
        let len = n - k - 1;
        let mut v: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = super::norm2(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // H <- (I - tau v vᴴ) H
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            s *= tau;
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * s;
            }
        }
        // H <- H (I - tau v vᴴ), Q <- Q (I - tau v vᴴ)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for l in 0..len {
                    s += m[(i, k + 1 + l)] * v[l];
                }
                s *= tau;
                for l in 0..len {
                    m[(i, k + 1 + l)] -= s * v[l].conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur form of a square matrix.
pub fn schur(a: &CMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::Shape("Schur decomposition requires a square matrix"));
    }
    let n = a.rows();
    let (mut t, mut z) = hessenberg(a);
    if n < 2 {
        return Ok(Schur { t, z });
    }
    let norm = t.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Deflation search.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut scale = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if sub <= eps * scale {
                t[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::Invalid("QR iteration failed to converge"));
        }
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        // Single-shift bulge chase on the active window lo..=hi.
        for k in lo..hi {
            let g = if k == lo { Givens::new(t[(lo, lo)] - mu, t[(lo + 1, lo)]) } else { Givens::new(t[(k, k - 1)], t[(k + 1, k - 1)]) };
            let from = if k == lo { lo } else { k - 1 };
            g.rotate_rows(&mut t, k, k + 1, from);
            let to = (k + 3).min(hi + 1);
            g.rotate_cols(&mut t, k, k + 1, to);
            g.rotate_cols(&mut z, k, k + 1, n);
            if k > lo {
                t[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(Schur { t, z })
}

pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let s = schur(a)?;
    Ok((0..a.rows()).map(|i| s.t[(i, i)]).collect())
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Swaps diagonal entries `k` and `k + 1` of `T` keeping `A = Z T Zᴴ`.
    pub fn swap_adjacent(&mut self, k: usize) {
        let n = self.t.rows();
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        let g = Givens::new(self.t[(k, k + 1)], t22 - t11);
        if k + 2 < n {
            g.rotate_rows(&mut self.t, k, k + 1, k + 2);
        }
        g.rotate_cols(&mut self.t, k, k + 1, k);
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
        g.rotate_cols(&mut self.z, k, k + 1, n);
    }

    /// Moves the diagonal entry at `from` up to position `to <= from`.
    pub fn move_up(&mut self, from: usize, to: usize) {
        let mut k = from;
        while k > to {
            self.swap_adjacent(k - 1);
            k -= 1;
        }
    }

    /// Eigenvectors of the triangular factor by back substitution, as columns.
    pub fn triangular_eigenvectors(&self) -> CMatrix {
        let n = self.t.rows();
        let small = f64::EPSILON * self.t.norm_fro().max(f64::MIN_POSITIVE);
        let mut y = CMatrix::zeros(n, n);
        for i in 0..n {
            let lambda = self.t[(i, i)];
            y[(i, i)] = C64::new(1.0, 0.0);
            for j in (0..i).rev() {
                let mut s = C64::new(0.0, 0.0);
                for l in (j + 1)..=i {
                    s += self.t[(j, l)] * y[(l, i)];
                }
                let mut d = self.t[(j, j)] - lambda;
                if d.norm() < small {
                    d = C64::new(small, 0.0);
                }
                y[(j, i)] = -s / d;
            }
        }
        y
    }

    /// Eigenvectors of the original matrix (unit 2-norm columns).
    pub fn eigenvectors(&self) -> CMatrix {
        let mut x = self.z.matmul(&self.triangular_eigenvectors());
        for j in 0..x.cols() {
            let col = x.column(j);
            let nrm = super::norm2(&col);
            if nrm > 0.0 {
                let scaled: Vec<C64> = col.iter().map(|v| v / nrm).collect();
                x.set_column(j, &scaled);
            }
        }
        x
    }
}

//! Reference values for the segment forms by direct numerical integration
//! in the radial variable.
//!
//! Every monomial `zʲ` is the Hardy image of
//! `uⱼ(ξ) = 2iκ₀ e^{iκ₀ξ} Lⱼ(−2iκ₀ξ)` with `Lⱼ` the Laguerre polynomials. The
//! oracle integrates the physical integrands (full Jacobian `J(ξ, x̂)`
//! inverted numerically, Piola maps for H(curl) and H(div)) with composite
//! Gauss–Legendre in `ξ` and a high-order rule on the triangle. It uses none
//! of `D`, `I` or `B`.
//!
//! Along real `ξ` the integrands oscillate and peak far above the result, so
//! the `ξ`-integral is taken on the ray `ξ = c·x/(2|κ₀|)`, `c = i κ̄₀/|κ₀|`,
//! where `−2iκ₀ξ = x` is real and `e^{iκ₀ξ} = e^{−x/2}`. The integrands are
//! analytic in the sector between this ray and the positive axis (the only
//! singularity of `J⁻¹` is at `ξ = −1`) and decay there when `Im κ₀ > 0`, so
//! by Cauchy's theorem the value is unchanged. `|det J|` is continued as
//! `sign(det Ĵ) det J`.

use alloc::vec;
use alloc::vec::Vec;

use super::{FormKind, PrismSegment};
use crate::derham::TensorLayout;
use crate::hardy::{radial_bases, HardyCoefficients, MoebiusParams};
use crate::linalg::CMatrix;
use crate::quadrature::{gauss_legendre, triangle_quadrature};
use crate::surface::monomial_with_gradient;
use crate::{c64, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    /// Truncation of the rotated radial integral in `x = −2iκ₀ξ`; the
    /// integrands decay like `e^{−x}`.
    pub x_max: f64,
    pub panels: usize,
    pub points_per_panel: usize,
    /// Extra degree on top of `2p + 2` for the surface rule.
    pub extra_surface_degree: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { x_max: 160.0, panels: 80, points_per_panel: 16, extra_surface_degree: 4 }
    }
}

/// `u(ξ) = Σⱼ cⱼ uⱼ(ξ)` for monomial coefficients `cⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialFunction {
    pub kappa0: C64,
    pub coeffs: Vec<C64>,
}

impl RadialFunction {
    /// Value and `ξ`-derivative at a complex `ξ`.
    pub fn eval_with_derivative(&self, xi: C64) -> (C64, C64) {
        let ik0 = c64(0.0, 1.0) * self.kappa0;
        let x = -ik0 * xi * 2.0;
        // Lⱼ by the three-term recurrence; Lⱼ′ = −Σ_{m<j} Lₘ.
        let (mut lm1, mut l) = (C64::new(0.0, 0.0), c64(1.0, 0.0));
        let mut partial = C64::new(0.0, 0.0);
        let (mut v, mut d) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (j, c) in self.coeffs.iter().enumerate() {
            v += c * l;
            // d/dξ [e^{iκ₀ξ} Lⱼ(x)] = iκ₀ e^{iκ₀ξ} (Lⱼ + 2 Σ_{m<j} Lₘ)
            d += c * (l + partial * 2.0);
            partial += l;
            let jf = j as f64;
            let next = ((c64(2.0 * jf + 1.0, 0.0) - x) * l - lm1 * jf) / (jf + 1.0);
            lm1 = l;
            l = next;
        }
        let e = (ik0 * xi).exp() * ik0 * 2.0;
        (e * v, e * ik0 * d)
    }

    pub fn eval(&self, xi: C64) -> C64 {
        self.eval_with_derivative(xi).0
    }
}

/// Inverse transform of a coefficient vector (any basis tag).
pub fn radial_function(u: &HardyCoefficients, params: &MoebiusParams) -> RadialFunction {
    RadialFunction { kappa0: params.kappa0(), coeffs: u.to_monomial(params).coeffs }
}

/// Nodes `ξ` and weights `dξ` of the rotated radial rule.
pub fn radial_rule(params: &MoebiusParams, opts: &OracleOptions) -> (Vec<C64>, Vec<C64>) {
    let k0 = params.kappa0();
    let dir = c64(0.0, 1.0) * k0.conj() / (2.0 * k0.norm() * k0.norm());
    let (gx, gw) = gauss_legendre(opts.points_per_panel);
    let h = opts.x_max / opts.panels as f64;
    let mut xi = Vec::with_capacity(opts.panels * gx.len());
    let mut w = Vec::with_capacity(xi.capacity());
    for pnl in 0..opts.panels {
        let a = pnl as f64 * h;
        for (x, wx) in gx.iter().zip(&gw) {
            xi.push(dir * (a + 0.5 * h * (x + 1.0)));
            w.push(dir * (0.5 * h * wx));
        }
    }
    (xi, w)
}

type CMat3 = [[C64; 3]; 3];

fn cdet3(m: &CMat3) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn cinv3(m: &CMat3) -> CMat3 {
    let d = cdet3(m);
    let c = |r: usize, k: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
        m[r1][k1] * m[r2][k2] - m[r1][k2] * m[r2][k1]
    };
    core::array::from_fn(|i| core::array::from_fn(|j| c(j, i) / d))
}

fn cmul_t(a: &CMat3, b: &CMat3, ta: bool, tb: bool) -> CMat3 {
    let get = |m: &CMat3, i: usize, j: usize, t: bool| if t { m[j][i] } else { m[i][j] };
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| get(a, i, k, ta) * get(b, k, j, tb)).sum()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Radial {
    /// `Ψₖ(ξ)`
    Psi,
    /// `Ψₖ′(ξ)`, the derivative of the function above
    DPsi,
    /// inverse transform of `ψₖ`
    PsiPrime,
}

/// `(component, radial kind, radial index, surface monomial, derivative, sign)`
type Term = (usize, Radial, usize, (usize, usize), usize, f64);

fn fields(kind: FormKind, layout: &TensorLayout) -> (Vec<Vec<Term>>, Vec<Vec<Term>>) {
    let space = kind.space();
    let blocks = layout.blocks(space);
    let mut mass = Vec::new();
    let mut stiff = Vec::new();
    for t in layout.basis(space) {
        let (c, i, j) = blocks[t.block].1.basis()[t.surface];
        let m = (i, j);
        let k = t.radial;
        use Radial::*;
        let (ma, st): (Vec<Term>, Vec<Term>) = match (kind, t.block, c) {
            (FormKind::H1, _, _) => {
                (vec![(0, Psi, k, m, 0, 1.0)], vec![(0, DPsi, k, m, 0, 1.0), (1, Psi, k, m, 1, 1.0), (2, Psi, k, m, 2, 1.0)])
            }
            (FormKind::Hcurl, 0, _) => (vec![(0, PsiPrime, k, m, 0, 1.0)], vec![(1, PsiPrime, k, m, 2, 1.0), (2, PsiPrime, k, m, 1, -1.0)]),
            (FormKind::Hcurl, _, 0) => (vec![(1, Psi, k, m, 0, 1.0)], vec![(0, Psi, k, m, 2, -1.0), (2, DPsi, k, m, 0, 1.0)]),
            (FormKind::Hcurl, _, _) => (vec![(2, Psi, k, m, 0, 1.0)], vec![(0, Psi, k, m, 1, 1.0), (1, DPsi, k, m, 0, -1.0)]),
            (FormKind::Hdiv, 0, _) => (vec![(0, Psi, k, m, 0, 1.0)], vec![(0, DPsi, k, m, 0, 1.0)]),
            (FormKind::Hdiv, _, c) => (vec![(1 + c, PsiPrime, k, m, 0, 1.0)], vec![(0, PsiPrime, k, m, 1 + c, 1.0)]),
        };
        mass.push(ma);
        stiff.push(st);
    }
    (mass, stiff)
}

/// Physical weight for reference field components at one point.
#[derive(Clone, Copy)]
enum Weight {
    /// `|det J|` on component 0
    Det,
    /// `J⁻¹J⁻ᵀ |det J|` (covariant Piola)
    Covariant,
    /// `JᵀJ / |det J|` (contravariant Piola)
    Contravariant,
    /// `1 / |det J|` on component 0
    InvDet,
}

/// `sign` is the sign of `det J` on the real axis.
fn weight_matrix(w: Weight, j: &CMat3, sign: f64) -> CMat3 {
    let d = cdet3(j) * sign;
    let zero = C64::new(0.0, 0.0);
    let first = |v: C64| core::array::from_fn(|r| core::array::from_fn(|c| if r == 0 && c == 0 { v } else { zero }));
    match w {
        Weight::Det => first(d),
        Weight::InvDet => first(d.inv()),
        Weight::Covariant => {
            let inv = cinv3(j);
            let m = cmul_t(&inv, &inv, false, true);
            m.map(|r| r.map(|x| x * d))
        }
        Weight::Contravariant => {
            let m = cmul_t(j, j, true, false);
            m.map(|r| r.map(|x| x / d))
        }
    }
}

/// Mass and stiffness reference matrices in the basis order of the assembled forms.
pub fn oracle_forms(
    kind: FormKind,
    segment: &PrismSegment,
    p: usize,
    n: usize,
    params: &MoebiusParams,
    opts: &OracleOptions,
) -> Result<(CMatrix, CMatrix)> {
    if !(params.kappa0().im > 0.0) {
        return Err(Error::Invalid("the radial oracle needs Im kappa0 > 0"));
    }
    let layout = TensorLayout { p, n };
    let (mass_terms, stiff_terms) = fields(kind, &layout);
    let (mass_w, stiff_w) = match kind {
        FormKind::H1 => (Weight::Det, Weight::Covariant),
        FormKind::Hcurl => (Weight::Covariant, Weight::Contravariant),
        FormKind::Hdiv => (Weight::Contravariant, Weight::InvDet),
    };

    // Radial quadrature and basis function values.
    let (xi, wxi) = radial_rule(params, opts);
    let (big, small) = radial_bases(n, params);
    let r = n + 2;
    let mut vals = [
        vec![vec![C64::new(0.0, 0.0); xi.len()]; r],
        vec![vec![C64::new(0.0, 0.0); xi.len()]; r],
        vec![vec![C64::new(0.0, 0.0); xi.len()]; r],
    ];
    for k in 0..r {
        let fb = radial_function(&big[k], params);
        let fs = radial_function(&small[k], params);
        for (ix, &x) in xi.iter().enumerate() {
            let (v, d) = fb.eval_with_derivative(x);
            vals[0][k][ix] = v;
            vals[1][k][ix] = d;
            vals[2][k][ix] = fs.eval(x);
        }
    }
    let slot = |rk: Radial| match rk {
        Radial::Psi => 0,
        Radial::DPsi => 1,
        Radial::PsiPrime => 2,
    };

    let quad = triangle_quadrature(2 * p + 2 + opts.extra_surface_degree);
    let [a, b, c] = segment.triangle;

    let mut out = Vec::with_capacity(2);
    for (terms, wkind, with_eps) in [(&mass_terms, mass_w, true), (&stiff_terms, stiff_w, false)] {
        // radial integrals T[q][(c, c', kind, kind')][ka][kb]
        let mut keys: Vec<(usize, usize, Radial, Radial)> = Vec::new();
        for ta in terms.iter().flatten() {
            for tb in terms.iter().flatten() {
                let key = (ta.0, tb.0, ta.1, tb.1);
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
        let nq = quad.len();
        let mut tbl = vec![vec![C64::new(0.0, 0.0); keys.len() * r * r]; nq];
        for (q, node) in quad.nodes.iter().enumerate() {
            let (s, t) = (node[0], node[1]);
            let x: [f64; 3] = core::array::from_fn(|i| a[i] + s * (b[i] - a[i]) + t * (c[i] - a[i]));
            let eps = if with_eps { segment.eps.at(s, t) } else { c64(1.0, 0.0) };
            let sign = super::det3(&segment.jhat(s, t)).signum();
            for (ix, &xv) in xi.iter().enumerate() {
                let one = xv + 1.0;
                let jac: CMat3 = core::array::from_fn(|i| [c64(x[i] - segment.v0[i], 0.0), one * (b[i] - a[i]), one * (c[i] - a[i])]);
                let wm = weight_matrix(wkind, &jac, sign);
                for (kk, &(ca, cb, ra, rb)) in keys.iter().enumerate() {
                    let w = wm[ca][cb];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let f = eps * w * wxi[ix];
                    let va = &vals[slot(ra)];
                    let vb = &vals[slot(rb)];
                    let base = kk * r * r;
                    for ka in 0..r {
                        let fa = f * va[ka][ix];
                        for kb in 0..r {
                            tbl[q][base + ka * r + kb] += fa * vb[kb][ix];
                        }
                    }
                }
            }
        }
        // surface values of each term
        let sval = |term: &Term, node: &[f64; 2]| -> f64 {
            let (v, g) = monomial_with_gradient(term.3 .0, term.3 .1, node[0], node[1]);
            term.5
                * match term.4 {
                    0 => v,
                    1 => g[0],
                    _ => g[1],
                }
        };
        let dim = terms.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (ia, fa) in terms.iter().enumerate() {
            for (ib, fb) in terms.iter().enumerate() {
                let mut sum = C64::new(0.0, 0.0);
                for ta in fa {
                    for tb in fb {
                        let kk = keys.iter().position(|k| *k == (ta.0, tb.0, ta.1, tb.1)).unwrap();
                        let idx = kk * r * r + ta.2 * r + tb.2;
                        for (q, node) in quad.nodes.iter().enumerate() {
                            let sv = sval(ta, node) * sval(tb, node) * quad.weights[q];
                            if sv != 0.0 {
                                sum += tbl[q][idx] * sv;
                            }
                        }
                    }
                }
                m[(ia, ib)] = sum;
            }
        }
        out.push(m);
    }
    let stiffness = out.pop().unwrap();
    let mass = out.pop().unwrap();
    Ok((mass, stiffness))
}

/// Largest entry difference relative to the largest oracle entry.
pub fn normwise_relative_error(assembled: &CMatrix, oracle: &CMatrix) -> f64 {
    assembled.max_abs_diff(oracle) / oracle.max_abs().max(f64::MIN_POSITIVE)
}

/// Largest `|a − o| / max(|o|, floor · max|o|)` over all entries. The floor
/// keeps entries that vanish analytically from dominating.
pub fn entrywise_relative_error(assembled: &CMatrix, oracle: &CMatrix, floor: f64) -> f64 {
    let scale = oracle.max_abs() * floor;
    assembled
        .as_slice()
        .iter()
        .zip(oracle.as_slice())
        .map(|(a, o)| (a - o).norm() / o.norm().max(scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

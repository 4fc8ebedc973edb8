//! One infinite pyramidal frustum
//! `K = {V₀ + (1 + ξ)(x̂ − V₀) : ξ ≥ 0, x̂ ∈ T}` and its exterior forms.
//!
//! The reference coordinates are `(ξ, s, t)` with `x̂ = A + s(B − A) + t(C − A)`.
//! The Jacobian factors as `J = Ĵ diag(1, 1 + ξ, 1 + ξ)` with
//! `Ĵ = [x̂ − V₀, B − A, C − A]`. Powers of `1 + ξ` left over in the
//! transformed integrands become powers of `D` (positive) or `I = D⁻¹`
//! (negative) on the radial factors before the bilinear form `B`:
//!
//! | form | surface weight | radial pattern |
//! |------|----------------|----------------|
//! | H¹ mass | `ε |Ĵ|` | `B(DU, DV)` |
//! | H¹ stiffness, H(curl) mass | `G = |Ĵ| Ĵ⁻¹Ĵ⁻ᵀ` | `(D,D)`, `(D,id)`, `(id,D)`, `(id,id)` |
//! | H(curl) stiffness, H(div) mass | `C = ĴᵀĴ / |Ĵ|` | `(I,I)`, `(I,id)`, `(id,I)`, `(id,id)` |
//! | H(div) stiffness | `1 / |Ĵ|` | `B(IU, IV)` |
//!
//! The pattern entries refer to the `(ξ, ξ)`, `(ξ, surface)`,
//! `(surface, ξ)` and `(surface, surface)` blocks of the 3×3 weight. The
//! mass forms carry `ε`. Basis ordering follows [`crate::derham::TensorLayout`]:
//! H¹ uses `W`, H(curl) uses `V` and H(div) uses `Q`.

pub mod reference;

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::derham::{Space, TensorIndex, TensorLayout};
use crate::hardy::{pair_matrix, radial_coefficients, MoebiusParams, RadialFamily, RadialOp, DEFAULT_INVERSE_PADDING};
use crate::linalg::CMatrix;
use crate::quadrature::{triangle_quadrature, QuadratureRule};
use crate::surface::{monomial_with_gradient, TrianglePolySpace};
use crate::{c64, Error, Result, C64};

pub type Vec3 = [f64; 3];
/// Row-major 3×3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// Relative threshold for `|Ĵ|` against the cube of the segment diameter.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Permittivity on one segment: constant, or a function of the reference
/// surface coordinates `(s, t)` only.
#[derive(Clone, Copy, Debug)]
pub enum Permittivity {
    Constant(C64),
    Surface(fn(f64, f64) -> C64),
}

impl Permittivity {
    pub fn at(&self, s: f64, t: f64) -> C64 {
        match self {
            Self::Constant(e) => *e,
            Self::Surface(f) => f(s, t),
        }
    }
}

impl Default for Permittivity {
    fn default() -> Self {
        Self::Constant(c64(1.0, 0.0))
    }
}

#[derive(Clone, Debug)]
pub struct PrismSegment {
    /// Surface triangle `A, B, C`.
    pub triangle: [Vec3; 3],
    pub v0: Vec3,
    pub eps: Permittivity,
    pub quad: QuadratureRule,
}

impl PrismSegment {
    pub fn new(triangle: [Vec3; 3], v0: Vec3, eps: Permittivity, quad: QuadratureRule) -> Self {
        Self { triangle, v0, eps, quad }
    }

    /// Surface quadrature of degree `2p + 2`, exact for the affine segment
    /// integrands of order `p`.
    pub fn with_order(triangle: [Vec3; 3], v0: Vec3, eps: Permittivity, p: usize) -> Self {
        Self::new(triangle, v0, eps, triangle_quadrature(default_quadrature_degree(p)))
    }

    /// `x̂(s, t)`.
    pub fn point(&self, s: f64, t: f64) -> Vec3 {
        let [a, b, c] = self.triangle;
        core::array::from_fn(|i| a[i] + s * (b[i] - a[i]) + t * (c[i] - a[i]))
    }

    /// `Ĵ(s, t) = [x̂ − V₀, B − A, C − A]` (columns).
    pub fn jhat(&self, s: f64, t: f64) -> Mat3 {
        let x = self.point(s, t);
        let [a, b, c] = self.triangle;
        core::array::from_fn(|i| [x[i] - self.v0[i], b[i] - a[i], c[i] - a[i]])
    }

    /// Largest distance between two of the four defining points.
    pub fn diameter(&self) -> f64 {
        let pts = [self.triangle[0], self.triangle[1], self.triangle[2], self.v0];
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let s: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum();
                d = d.max(s.sqrt());
            }
        }
        d
    }
}

pub fn default_quadrature_degree(p: usize) -> usize {
    2 * p + 2
}

pub(crate) fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn inv3(m: &Mat3) -> Mat3 {
    let d = det3(m);
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 1, 2, 2) / d, -c(0, 1, 2, 2) / d, c(0, 1, 1, 2) / d],
        [-c(1, 0, 2, 2) / d, c(0, 0, 2, 2) / d, -c(0, 0, 1, 2) / d],
        [c(1, 0, 2, 1) / d, -c(0, 0, 2, 1) / d, c(0, 0, 1, 1) / d],
    ]
}

pub(crate) fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub(crate) fn mat3_t(a: &Mat3) -> Mat3 {
    core::array::from_fn(|i| core::array::from_fn(|j| a[j][i]))
}

/// Geometry at one surface quadrature node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFactors {
    pub node: [f64; 2],
    pub weight: f64,
    pub jhat: Mat3,
    /// Signed `det Ĵ`.
    pub det: f64,
    /// `|Ĵ| Ĵ⁻¹ Ĵ⁻ᵀ`
    pub g: Mat3,
    /// `ĴᵀĴ / |Ĵ|`
    pub c: Mat3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryFactors {
    pub nodes: Vec<NodeFactors>,
}

pub fn geometry_factors(segment: &PrismSegment) -> Result<GeometryFactors> {
    let threshold = DEGENERATE_TOL * segment.diameter().powi(3);
    let mut nodes = Vec::with_capacity(segment.quad.len());
    for (n, &w) in segment.quad.nodes.iter().zip(&segment.quad.weights) {
        let jhat = segment.jhat(n[0], n[1]);
        let det = det3(&jhat);
        if !(det.abs() > threshold) {
            return Err(Error::DegenerateGeometry { det: det.abs(), threshold });
        }
        let ad = det.abs();
        let inv = inv3(&jhat);
        let mut g = mat3_mul(&inv, &mat3_t(&inv));
        let mut c = mat3_mul(&mat3_t(&jhat), &jhat);
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] *= ad;
                c[i][j] /= ad;
            }
        }
        nodes.push(NodeFactors { node: *n, weight: w, jhat, det, g, c });
    }
    Ok(GeometryFactors { nodes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    H1,
    Hcurl,
    Hdiv,
}

impl FormKind {
    pub fn space(self) -> Space {
        match self {
            Self::H1 => Space::W,
            Self::Hcurl => Space::V,
            Self::Hdiv => Space::Q,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SegmentFormSet {
    pub kind: FormKind,
    pub mass: CMatrix,
    pub stiffness: CMatrix,
    pub basis: Vec<TensorIndex>,
    pub p: usize,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormOptions {
    /// Extra monomials for the truncated `D⁻¹` (see [`crate::hardy::radial_coefficients`]).
    pub inverse_padding: usize,
}

impl Default for FormOptions {
    fn default() -> Self {
        Self { inverse_padding: DEFAULT_INVERSE_PADDING }
    }
}

/// One separable component `Φ_k(ξ) · value(s, t)` of a reference field.
#[derive(Clone, Debug)]
struct Component {
    comp: usize,
    family: RadialFamily,
    radial: usize,
    /// Surface factor at every quadrature node.
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    /// Jacobian powers of `G`: `D` on the ξ component.
    G,
    /// Jacobian powers of `C`: `I` on the ξ component.
    C,
    /// Only the `(0, 0)` weight with the given operators.
    Scalar(RadialOp),
}

impl Pattern {
    fn ops(self, ca: usize, cb: usize) -> (RadialOp, RadialOp) {
        let special = match self {
            Self::G => RadialOp::D,
            Self::C => RadialOp::I,
            Self::Scalar(op) => op,
        };
        (if ca == 0 { special } else { RadialOp::Id }, if cb == 0 { special } else { RadialOp::Id })
    }
}

/// Lazily built radial pair matrices `B(op_a Φ, op_b Φ')`.
struct RadialCache<'a> {
    n: usize,
    params: &'a MoebiusParams,
    padding: usize,
    coeffs: Vec<((RadialFamily, RadialOp), CMatrix)>,
    pairs: Vec<((RadialFamily, RadialOp, RadialFamily, RadialOp), CMatrix)>,
}

impl<'a> RadialCache<'a> {
    fn new(n: usize, params: &'a MoebiusParams, padding: usize) -> Self {
        Self { n, params, padding, coeffs: Vec::new(), pairs: Vec::new() }
    }

    fn coeff(&mut self, f: RadialFamily, op: RadialOp) -> Result<usize> {
        if let Some(i) = self.coeffs.iter().position(|(k, _)| *k == (f, op)) {
            return Ok(i);
        }
        let m = radial_coefficients(self.n, self.params, f, op, self.padding)?;
        self.coeffs.push(((f, op), m));
        Ok(self.coeffs.len() - 1)
    }

    fn pair(&mut self, fa: RadialFamily, oa: RadialOp, fb: RadialFamily, ob: RadialOp) -> Result<usize> {
        let key = (fa, oa, fb, ob);
        if let Some(i) = self.pairs.iter().position(|(k, _)| *k == key) {
            return Ok(i);
        }
        let ia = self.coeff(fa, oa)?;
        let ib = self.coeff(fb, ob)?;
        let m = pair_matrix(&self.coeffs[ia].1, &self.coeffs[ib].1, self.params);
        self.pairs.push((key, m));
        Ok(self.pairs.len() - 1)
    }
}

/// `Σ_q Σ_{c,c'} W_q[c][c'] S_a,c(q) S_b,c'(q) R[c,c'](k_a, k_b)`.
fn assemble_form(fields: &[Vec<Component>], weights: &[[[C64; 3]; 3]], pattern: Pattern, cache: &mut RadialCache<'_>) -> Result<CMatrix> {
    let dim = fields.len();
    // Resolve radial matrices for every occurring combination up front.
    let mut keys: Vec<(usize, usize, RadialFamily, RadialFamily, usize)> = Vec::new();
    for fa in fields {
        for ca in fa {
            for fb in fields {
                for cb in fb {
                    if keys.iter().any(|k| k.0 == ca.comp && k.1 == cb.comp && k.2 == ca.family && k.3 == cb.family) {
                        continue;
                    }
                    let (oa, ob) = pattern.ops(ca.comp, cb.comp);
                    let idx = cache.pair(ca.family, oa, cb.family, ob)?;
                    keys.push((ca.comp, cb.comp, ca.family, cb.family, idx));
                }
            }
        }
    }
    let lookup = |ca: &Component, cb: &Component| -> usize {
        keys.iter().find(|k| k.0 == ca.comp && k.1 == cb.comp && k.2 == ca.family && k.3 == cb.family).map(|k| k.4).unwrap()
    };
    let nq = weights.len();
    let mut out = CMatrix::zeros(dim, dim);
    for (a, fa) in fields.iter().enumerate() {
        for (b, fb) in fields.iter().enumerate() {
            let mut sum = C64::new(0.0, 0.0);
            for ca in fa {
                for cb in fb {
                    let mut surf = C64::new(0.0, 0.0);
                    for q in 0..nq {
                        let w = weights[q][ca.comp][cb.comp];
                        if w.re == 0.0 && w.im == 0.0 {
                            continue;
                        }
                        surf += w * (ca.values[q] * cb.values[q]);
                    }
                    if surf.re == 0.0 && surf.im == 0.0 {
                        continue;
                    }
                    let r = &cache.pairs[lookup(ca, cb)].1;
                    sum += surf * r[(ca.radial, cb.radial)];
                }
            }
            out[(a, b)] = sum;
        }
    }
    Ok(out)
}

/// Surface factor values at the nodes: `deriv` 0 is the value, 1 is `∂s`, 2 is `∂t`.
fn surface_values(nodes: &[NodeFactors], i: usize, j: usize, deriv: usize, sign: f64) -> Vec<f64> {
    nodes
        .iter()
        .map(|n| {
            let (v, g) = monomial_with_gradient(i, j, n.node[0], n.node[1]);
            sign * match deriv {
                0 => v,
                1 => g[0],
                _ => g[1],
            }
        })
        .collect()
}

fn comp(comp: usize, family: RadialFamily, radial: usize, values: Vec<f64>) -> Component {
    Component { comp, family, radial, values }
}

fn surface_exponents(blocks: &[(RadialFamily, TrianglePolySpace)], t: &TensorIndex) -> (usize, usize, usize) {
    blocks[t.block].1.basis()[t.surface]
}

/// Weight arrays per node for a 3×3 geometric factor times `scale`.
fn weights_from(geo: &GeometryFactors, f: impl Fn(&NodeFactors) -> [[C64; 3]; 3]) -> Vec<[[C64; 3]; 3]> {
    geo.nodes.iter().map(f).collect()
}

fn scaled(m: &Mat3, s: C64) -> [[C64; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| s * m[i][j]))
}

fn only_00(s: C64) -> [[C64; 3]; 3] {
    let mut w = [[C64::new(0.0, 0.0); 3]; 3];
    w[0][0] = s;
    w
}

fn eps_at(seg: &PrismSegment, n: &NodeFactors) -> C64 {
    seg.eps.at(n.node[0], n.node[1])
}

fn check_order(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::Invalid("surface order p must be at least 1"));
    }
    TrianglePolySpace::new(p, crate::surface::SpaceKind::ScalarH1).map(|_| ())
}

pub fn assemble_h1(segment: &PrismSegment, p: usize, n: usize, params: &MoebiusParams) -> Result<SegmentFormSet> {
    assemble_h1_with(segment, p, n, params, &FormOptions::default())
}

pub fn assemble_h1_with(segment: &PrismSegment, p: usize, n: usize, params: &MoebiusParams, opts: &FormOptions) -> Result<SegmentFormSet> {
    check_order(p)?;
    let geo = geometry_factors(segment)?;
    let layout = TensorLayout { p, n };
    let blocks = layout.blocks(Space::W);
    let basis = layout.basis(Space::W);
    use RadialFamily::*;
    let mut mass_fields = Vec::with_capacity(basis.len());
    let mut stiff_fields = Vec::with_capacity(basis.len());
    for t in &basis {
        let (_, i, j) = surface_exponents(&blocks, t);
        let k = t.radial;
        mass_fields.push(alloc::vec![comp(0, Psi, k, surface_values(&geo.nodes, i, j, 0, 1.0))]);
        stiff_fields.push(alloc::vec![
            comp(0, PsiPrime, k, surface_values(&geo.nodes, i, j, 0, 1.0)),
            comp(1, Psi, k, surface_values(&geo.nodes, i, j, 1, 1.0)),
            comp(2, Psi, k, surface_values(&geo.nodes, i, j, 2, 1.0)),
        ]);
    }
    let mut cache = RadialCache::new(n, params, opts.inverse_padding);
    let mw = weights_from(&geo, |nf| only_00(eps_at(segment, nf) * (nf.weight * nf.det.abs())));
    let sw = weights_from(&geo, |nf| scaled(&nf.g, c64(nf.weight, 0.0)));
    let mass = assemble_form(&mass_fields, &mw, Pattern::Scalar(RadialOp::D), &mut cache)?;
    let stiffness = assemble_form(&stiff_fields, &sw, Pattern::G, &mut cache)?;
    Ok(SegmentFormSet { kind: FormKind::H1, mass, stiffness, basis, p, n })
}

pub fn assemble_hcurl(segment: &PrismSegment, p: usize, n: usize, params: &MoebiusParams) -> Result<SegmentFormSet> {
    assemble_hcurl_with(segment, p, n, params, &FormOptions::default())
}

pub fn assemble_hcurl_with(
    segment: &PrismSegment,
    p: usize,
    n: usize,
    params: &MoebiusParams,
    opts: &FormOptions,
) -> Result<SegmentFormSet> {
    check_order(p)?;
    let geo = geometry_factors(segment)?;
    let layout = TensorLayout { p, n };
    let blocks = layout.blocks(Space::V);
    let basis = layout.basis(Space::V);
    use RadialFamily::*;
    let nodes = &geo.nodes;
    let mut mass_fields = Vec::with_capacity(basis.len());
    let mut stiff_fields = Vec::with_capacity(basis.len());
    for t in &basis {
        let (c, i, j) = surface_exponents(&blocks, t);
        let k = t.radial;
        let v = |d, s| surface_values(nodes, i, j, d, s);
        if t.block == 0 {
            // ê = (ψ m, 0, 0), ĉ = (0, ψ ∂t m, −ψ ∂s m)
            mass_fields.push(alloc::vec![comp(0, PsiPrime, k, v(0, 1.0))]);
            stiff_fields.push(alloc::vec![comp(1, PsiPrime, k, v(2, 1.0)), comp(2, PsiPrime, k, v(1, -1.0))]);
        } else if c == 0 {
            // ê = (0, Ψ m, 0), ĉ = (−Ψ ∂t m, 0, ψ m)
            mass_fields.push(alloc::vec![comp(1, Psi, k, v(0, 1.0))]);
            stiff_fields.push(alloc::vec![comp(0, Psi, k, v(2, -1.0)), comp(2, PsiPrime, k, v(0, 1.0))]);
        } else {
            // ê = (0, 0, Ψ m), ĉ = (Ψ ∂s m, −ψ m, 0)
            mass_fields.push(alloc::vec![comp(2, Psi, k, v(0, 1.0))]);
            stiff_fields.push(alloc::vec![comp(0, Psi, k, v(1, 1.0)), comp(1, PsiPrime, k, v(0, -1.0))]);
        }
    }
    let mut cache = RadialCache::new(n, params, opts.inverse_padding);
    let mw = weights_from(&geo, |nf| scaled(&nf.g, eps_at(segment, nf) * nf.weight));
    let sw = weights_from(&geo, |nf| scaled(&nf.c, c64(nf.weight, 0.0)));
    let mass = assemble_form(&mass_fields, &mw, Pattern::G, &mut cache)?;
    let stiffness = assemble_form(&stiff_fields, &sw, Pattern::C, &mut cache)?;
    Ok(SegmentFormSet { kind: FormKind::Hcurl, mass, stiffness, basis, p, n })
}

pub fn assemble_hdiv(segment: &PrismSegment, p: usize, n: usize, params: &MoebiusParams) -> Result<SegmentFormSet> {
    assemble_hdiv_with(segment, p, n, params, &FormOptions::default())
}

pub fn assemble_hdiv_with(
    segment: &PrismSegment,
    p: usize,
    n: usize,
    params: &MoebiusParams,
    opts: &FormOptions,
) -> Result<SegmentFormSet> {
    check_order(p)?;
    let geo = geometry_factors(segment)?;
    let layout = TensorLayout { p, n };
    let blocks = layout.blocks(Space::Q);
    let basis = layout.basis(Space::Q);
    use RadialFamily::*;
    let nodes = &geo.nodes;
    let mut mass_fields = Vec::with_capacity(basis.len());
    let mut stiff_fields = Vec::with_capacity(basis.len());
    for t in &basis {
        let (c, i, j) = surface_exponents(&blocks, t);
        let k = t.radial;
        let v = |d, s| surface_values(nodes, i, j, d, s);
        if t.block == 0 {
            // σ̂ = (Ψ m, 0, 0), ∇̂·σ̂ = ψ m
            mass_fields.push(alloc::vec![comp(0, Psi, k, v(0, 1.0))]);
            stiff_fields.push(alloc::vec![comp(0, PsiPrime, k, v(0, 1.0))]);
        } else {
            // σ̂ = ψ m in component 1 + c, ∇̂·σ̂ = ψ ∂m
            mass_fields.push(alloc::vec![comp(1 + c, PsiPrime, k, v(0, 1.0))]);
            stiff_fields.push(alloc::vec![comp(0, PsiPrime, k, v(1 + c, 1.0))]);
        }
    }
    let mut cache = RadialCache::new(n, params, opts.inverse_padding);
    let mw = weights_from(&geo, |nf| scaled(&nf.c, eps_at(segment, nf) * nf.weight));
    let sw = weights_from(&geo, |nf| only_00(c64(nf.weight / nf.det.abs(), 0.0)));
    let mass = assemble_form(&mass_fields, &mw, Pattern::C, &mut cache)?;
    let stiffness = assemble_form(&stiff_fields, &sw, Pattern::Scalar(RadialOp::I), &mut cache)?;
    Ok(SegmentFormSet { kind: FormKind::Hdiv, mass, stiffness, basis, p, n })
}

pub fn assemble(
    kind: FormKind,
    segment: &PrismSegment,
    p: usize,
    n: usize,
    params: &MoebiusParams,
    opts: &FormOptions,
) -> Result<SegmentFormSet> {
    match kind {
        FormKind::H1 => assemble_h1_with(segment, p, n, params, opts),
        FormKind::Hcurl => assemble_hcurl_with(segment, p, n, params, opts),
        FormKind::Hdiv => assemble_hdiv_with(segment, p, n, params, opts),
    }
}

/// The triangle `{e₁, e₂, e₃}` seen from the origin.
pub fn octant_segment(p: usize) -> PrismSegment {
    PrismSegment::with_order([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [0.0, 0.0, 0.0], Permittivity::default(), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derham::build_complex;
    use crate::hardy::radial_form_matrix;

    fn params(re: f64, im: f64) -> MoebiusParams {
        MoebiusParams::new(c64(re, im)).unwrap()
    }

    fn skewed_segment(p: usize) -> PrismSegment {
        PrismSegment::with_order(
            [[1.0, 0.1, 0.2], [0.2, 1.3, -0.1], [0.1, 0.3, 0.9]],
            [0.05, -0.1, 0.02],
            Permittivity::Constant(c64(2.0, 0.5)),
            p,
        )
    }

    #[test]
    fn octant_determinant() {
        let seg = octant_segment(2);
        let geo = geometry_factors(&seg).unwrap();
        for nf in &geo.nodes {
            let x = seg.point(nf.node[0], nf.node[1]);
            // cofactor expansion of [x, e₂ − e₁, e₃ − e₁] along the first column
            let direct = x[0] + x[1] + x[2];
            assert!((nf.det - direct).abs() < 1e-14);
            assert!((nf.det - 1.0).abs() < 1e-14);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((nf.g[i][j] - nf.g[j][i]).abs() < 1e-14);
                    assert!((nf.c[i][j] - nf.c[j][i]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn degenerate_segment_is_rejected() {
        let seg = PrismSegment::with_order(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            Permittivity::default(),
            1,
        );
        assert!(matches!(geometry_factors(&seg), Err(Error::DegenerateGeometry { .. })));
        assert!(assemble_h1(&seg, 1, 0, &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn forms_are_complex_symmetric() {
        let p0 = params(3.0, 1.0);
        for p in 1..=3 {
            let seg = skewed_segment(p);
            for kind in [FormKind::H1, FormKind::Hcurl, FormKind::Hdiv] {
                let f = assemble(kind, &seg, p, 3, &p0, &FormOptions::default()).unwrap();
                assert!(f.mass.symmetry_defect() <= 1e-12 * f.mass.max_abs(), "{kind:?} mass");
                assert!(f.stiffness.symmetry_defect() <= 1e-12 * f.stiffness.max_abs(), "{kind:?} stiffness");
                assert_eq!(f.basis.len(), f.mass.rows());
            }
        }
    }

    #[test]
    fn hcurl_mass_on_gradients_is_h1_stiffness() {
        let p0 = params(2.0, -0.5);
        let mut seg = skewed_segment(2);
        seg.eps = Permittivity::Constant(c64(1.0, 0.0));
        let c = build_complex(2, 3, &p0).unwrap();
        let h1 = assemble_h1(&seg, 2, 3, &p0).unwrap();
        let hc = assemble_hcurl(&seg, 2, 3, &p0).unwrap();
        let g = c.grad();
        let pulled = g.transpose().matmul(&hc.mass).matmul(g);
        assert!(pulled.max_abs_diff(&h1.stiffness) <= 1e-10 * h1.stiffness.max_abs());
    }

    #[test]
    fn chain_compatibility() {
        let p0 = params(3.0, 1.0);
        for p in 1..=3 {
            let seg = skewed_segment(p);
            let c = build_complex(p, 2, &p0).unwrap();
            let hc = assemble_hcurl(&seg, p, 2, &p0).unwrap();
            let hd = assemble_hdiv(&seg, p, 2, &p0).unwrap();
            let kg = hc.stiffness.matmul(c.grad());
            assert!(kg.max_abs() <= 1e-10 * hc.stiffness.max_abs());
            let kc = hd.stiffness.matmul(c.curl());
            assert!(kc.max_abs() <= 1e-10 * hd.stiffness.max_abs());
        }
    }

    #[test]
    fn small_triangle_limit_matches_radial_matrix() {
        // A tiny triangle in the plane x = 1 seen from the origin: G₀₀ = |Ĵ|,
        // so the constant-mode stiffness per unit area is B(Dψ, Dψ).
        let p0 = params(2.0, 1.0);
        let n = 3;
        let h = 1e-4;
        let seg = PrismSegment::with_order([[1.0, 0.0, 0.0], [1.0, h, 0.0], [1.0, 0.0, h]], [0.0, 0.0, 0.0], Permittivity::default(), 1);
        let f = assemble_h1(&seg, 1, n, &p0).unwrap();
        let area = 0.5 * h * h;
        let radial = radial_form_matrix(n, &p0, RadialFamily::PsiPrime, 1, 1).unwrap().entries;
        // constant surface mode has surface index 0 in each radial block of size 3
        for j in 0..n + 2 {
            for k in 0..n + 2 {
                let got = f.stiffness[(j * 3, k * 3)] / area;
                assert!((got - radial[(j, k)]).norm() < 1e-6 * radial.max_abs(), "({j}, {k})");
            }
        }
    }

    #[test]
    fn quadrature_degree_beyond_default_changes_nothing() {
        let p0 = params(3.0, 1.0);
        for p in 1..=3 {
            let base = skewed_segment(p);
            let mut fine = base.clone();
            fine.quad = triangle_quadrature(default_quadrature_degree(p) + 6);
            for kind in [FormKind::H1, FormKind::Hcurl, FormKind::Hdiv] {
                let a = assemble(kind, &base, p, 2, &p0, &FormOptions::default()).unwrap();
                let b = assemble(kind, &fine, p, 2, &p0, &FormOptions::default()).unwrap();
                // H(div) stiffness vanishes identically for p = 1.
                assert!(a.mass.max_abs_diff(&b.mass) <= 1e-12 * b.mass.max_abs());
                assert!(a.stiffness.max_abs_diff(&b.stiffness) <= 1e-12 * b.stiffness.max_abs());
            }
        }
    }

    #[test]
    fn surface_dependent_permittivity_hook() {
        fn eps(s: f64, _t: f64) -> C64 {
            c64(1.0 + s, 0.0)
        }
        let p0 = params(2.0, 0.0);
        let mut seg = octant_segment(1);
        let a = assemble_h1(&seg, 1, 1, &p0).unwrap();
        seg.eps = Permittivity::Surface(eps);
        let b = assemble_h1(&seg, 1, 1, &p0).unwrap();
        // ∫(1 + s) over T̂ is ½ + 1/6 for the constant surface mode
        let ratio = b.mass[(0, 0)] / a.mass[(0, 0)];
        assert!((ratio - c64(4.0 / 3.0, 0.0)).norm() < 1e-13);
        assert_eq!(a.stiffness, b.stiffness);
    }
}
